"""Symbol streams and overlapping substring statistics.

Words over an alphabet of size k are tuples of symbol indices.  Occurrence
counts are overlapping: "00" occurs twice in "0001".  The empty word occurs
once per position, so its count equals the stream length.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    InvalidInputError,
    ResourceLimitError,
    UndefinedDerivativeError,
)

# Words are packed into int64 codes, digit i weighted by k**(L-1-i).
# k**L must stay inside the int64 range.
_CODE_BITS = 62


class Alphabet:
    """Ordered finite symbol set.  Symbols are indices 0..k-1 with labels."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels):
        labels = tuple(str(c) for c in labels)
        if len(labels) < 2:
            raise InvalidInputError("alphabet needs at least two symbols")
        if len(set(labels)) != len(labels):
            raise InvalidInputError("alphabet labels must be distinct")
        if len(labels) > 256:
            # raw stream files store one byte per symbol
            raise InvalidInputError("alphabet larger than 256 symbols")
        self.labels = labels
        self._index = {c: i for i, c in enumerate(labels)}

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InvalidInputError(f"symbol {label!r} not in alphabet") from None

    def encode(self, text) -> tuple:
        """Word (tuple of indices) for a string of single-character labels."""
        return tuple(self.index(c) for c in text)

    def word_label(self, word) -> str:
        return "".join(self.labels[i] for i in word)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        if self.size > 8:
            return f"Alphabet(size={self.size})"
        return f"Alphabet({self.labels!r})"


BINARY = Alphabet(("0", "1"))


class SymbolStream:
    """Immutable run of symbol indices over a fixed alphabet."""

    __slots__ = ("alphabet", "data")

    def __init__(self, data, alphabet: Alphabet):
        arr = np.array(data, dtype=np.int64, copy=True)
        if arr.ndim != 1:
            raise InvalidInputError("stream data must be one-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= alphabet.size):
            raise InvalidInputError("symbol index outside alphabet range")
        arr.setflags(write=False)
        self.data = arr
        self.alphabet = alphabet

    @classmethod
    def from_text(cls, text, alphabet: Alphabet) -> "SymbolStream":
        return cls([alphabet.index(c) for c in text], alphabet)

    def prefix(self, n: int) -> "SymbolStream":
        return SymbolStream(self.data[:n], self.alphabet)

    def __len__(self):
        return int(self.data.size)

    def __repr__(self):
        return f"SymbolStream(len={len(self)}, k={self.alphabet.size})"


def count(s: SymbolStream, word) -> int:
    """Overlapping occurrences of ``word`` in ``s``.

    count(s, ()) == len(s): the empty word occurs once per position.
    """
    n = len(s)
    m = len(word)
    if m == 0:
        return n
    w = np.asarray(word, dtype=np.int64)
    if w.min() < 0 or w.max() >= s.alphabet.size:
        raise InvalidInputError("word contains a symbol outside the alphabet")
    if m > n:
        return 0
    data = s.data
    hits = np.ones(n - m + 1, dtype=bool)
    for j in range(m):
        hits &= data[j : j + n - m + 1] == w[j]
    return int(hits.sum())


class CountTable:
    """Occurrence counts for every word of length <= max_len + 1 in a stream.

    Words present in the stream are stored per length as sorted int64 codes
    with their counts; any absent word has count zero.  Built once, read only.
    """

    __slots__ = ("alphabet", "stream_length", "max_len", "_levels")

    def __init__(self, alphabet, stream_length, max_len, levels):
        self.alphabet = alphabet
        self.stream_length = stream_length
        self.max_len = max_len
        self._levels = levels

    def encode(self, word) -> int:
        k = self.alphabet.size
        code = 0
        for sym in word:
            if not 0 <= sym < k:
                raise InvalidInputError("word contains a symbol outside the alphabet")
            code = code * k + int(sym)
        return code

    def decode(self, code: int, length: int) -> tuple:
        k = self.alphabet.size
        out = []
        for _ in range(length):
            code, d = divmod(code, k)
            out.append(int(d))
        return tuple(reversed(out))

    def count(self, word) -> int:
        length = len(word)
        if length == 0:
            return self.stream_length
        if length > self.max_len + 1:
            raise InvalidInputError(
                f"word of length {length} beyond table coverage {self.max_len + 1}"
            )
        codes, counts = self._levels[length]
        i = int(np.searchsorted(codes, self.encode(word)))
        if i < codes.size and codes[i] == self.encode(word):
            return int(counts[i])
        return 0

    def counts_for_codes(self, codes, length):
        """Counts for an array of word codes, all of the same length."""
        if length == 0:
            return np.full(len(codes), self.stream_length, dtype=np.int64)
        if length > self.max_len + 1:
            raise InvalidInputError(
                f"word of length {length} beyond table coverage {self.max_len + 1}"
            )
        stored, counts = self._levels[length]
        codes = np.asarray(codes, dtype=np.int64)
        pos = np.searchsorted(stored, codes)
        pos_clipped = np.minimum(pos, max(stored.size - 1, 0))
        out = np.zeros(codes.size, dtype=np.int64)
        if stored.size:
            hit = stored[pos_clipped] == codes
            out[hit] = counts[pos_clipped[hit]]
        return out

    def successor_counts(self, word) -> np.ndarray:
        """Counts of word + sigma for each alphabet symbol sigma."""
        length = len(word)
        if length > self.max_len:
            raise InvalidInputError(
                f"successors of a length-{length} word need coverage {length + 1}"
            )
        k = self.alphabet.size
        base = self.encode(word) * k
        return self.counts_for_codes(base + np.arange(k, dtype=np.int64), length + 1)

    def level(self, length: int):
        """(codes, counts) arrays of all stored words of one length."""
        if not 1 <= length <= self.max_len + 1:
            raise InvalidInputError(f"no stored level of length {length}")
        return self._levels[length]


def build_count_table(
    s: SymbolStream, max_len: int, max_entries: int = 200_000_000
) -> CountTable:
    """Count table covering every word length up to max_len + 1.

    Matches the naive overlapping scan exactly.  Refuses tables whose distinct
    word bound (sum over lengths of min(n, k**L)) exceeds ``max_entries`` or
    whose codes would overflow int64.
    """
    if max_len < 0:
        raise InvalidInputError("max_len must be non-negative")
    k = s.alphabet.size
    n = len(s)
    depth = max_len + 1
    if depth * math.log2(k) > _CODE_BITS:
        raise ResourceLimitError(
            f"words of length {depth} over {k} symbols exceed the int64 code "
            "range; reduce max_len or use a smaller alphabet"
        )
    bound = 0
    for length in range(1, depth + 1):
        bound += min(n, k**length)
        if bound > max_entries:
            raise ResourceLimitError(
                f"count table would hold more than {max_entries} entries; "
                "reduce max_len or raise max_entries explicitly"
            )
    levels = [None] * (depth + 1)
    data = s.data
    codes = None
    empty = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    for length in range(1, depth + 1):
        if length > n:
            levels[length] = empty
            continue
        if length == 1:
            codes = data.astype(np.int64)
        else:
            codes = codes[:-1] * k + data[length - 1 :]
        uniq, cnt = np.unique(codes, return_counts=True)
        levels[length] = (uniq, cnt.astype(np.int64))
    return CountTable(s.alphabet, n, max_len, levels)


def symbolic_derivative(t: CountTable, word) -> np.ndarray:
    """Successor distribution of ``word``: counts of word+sigma, normalized.

    Undefined (raises) when no successor of the word was ever observed.
    """
    succ = t.successor_counts(word)
    total = int(succ.sum())
    if total == 0:
        raise UndefinedDerivativeError(
            f"no observed successor of word {tuple(word)!r}"
        )
    return succ / total


def entropy(dist) -> float:
    """Shannon entropy in bits.  Zero entries contribute zero."""
    p = np.asarray(dist, dtype=float)
    nz = p[p > 0.0]
    return float(-(nz * np.log2(nz)).sum())
