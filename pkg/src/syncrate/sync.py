"""Search for approximately synchronizing words.

A word synchronizes an observer when the next-symbol distribution after it no
longer depends on what came before it.  Good candidates show up as extreme
points of the cloud of symbolic derivatives: interior points are mixtures of
several hidden states, vertices are not.  The search collects derivatives of
all sufficiently frequent words, keeps the hull vertices, and picks the most
frequent vertex word.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import InsufficientDataError, InvalidInputError, InvalidParameterError
from .streams import Alphabet, CountTable

# word lengths grow logarithmically in 1/epsilon; the cap keeps the table
# build bounded when callers pass an extravagant tolerance
MAX_CANDIDATE_LENGTH = 12


def candidate_length(epsilon: float, alphabet_size: int, cap: int = MAX_CANDIDATE_LENGTH) -> int:
    """Longest word length the search needs to examine for tolerance epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if alphabet_size < 2:
        raise InvalidParameterError("alphabet must have at least two symbols")
    length = math.ceil(math.log(1.0 / epsilon) / math.log(alphabet_size))
    return min(max(length, 1), cap)


class DerivativeMap:
    """Symbolic derivatives of every frequent word, keyed by word.

    ``entries`` maps a word tuple to ``(derivative, count)`` in deterministic
    order: by length, then lexicographically.
    """

    __slots__ = ("alphabet", "stream_length", "entries")

    def __init__(self, alphabet: Alphabet, stream_length: int, entries: dict):
        self.alphabet = alphabet
        self.stream_length = stream_length
        self.entries = entries

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"DerivativeMap({len(self.entries)} words, stream_length={self.stream_length})"


def collect_derivatives(table: CountTable, max_len: int, min_count: int) -> DerivativeMap:
    """Derivatives of every word up to max_len seen at least min_count times.

    Words whose every occurrence sits at the end of the stream have no
    successor and are skipped.  Raises InsufficientDataError when nothing
    survives the count threshold.
    """
    if max_len < 0:
        raise InvalidParameterError("max_len must be non-negative")
    if max_len > table.max_len:
        raise InvalidInputError(
            f"count table covers words up to length {table.max_len}, "
            f"search needs {max_len}"
        )
    k = table.alphabet.size
    entries: dict = {}
    if table.stream_length >= min_count:
        succ = table.successor_counts(())
        total = int(succ.sum())
        if total > 0:
            entries[()] = (succ / total, table.stream_length)
    for length in range(1, max_len + 1):
        codes, counts = table.level(length)
        keep = counts >= min_count
        kept_codes = codes[keep]
        kept_counts = counts[keep]
        if kept_codes.size == 0:
            continue
        succ_codes = kept_codes[:, None] * k + np.arange(k, dtype=np.int64)[None, :]
        succ_counts = table.counts_for_codes(succ_codes.ravel(), length + 1)
        succ_counts = succ_counts.reshape(-1, k)
        totals = succ_counts.sum(axis=1)
        for i in range(kept_codes.shape[0]):
            if totals[i] == 0:
                continue
            word = table.decode(int(kept_codes[i]), length)
            entries[word] = (succ_counts[i] / totals[i], int(kept_counts[i]))
    if not entries:
        raise InsufficientDataError(
            f"no word of length <= {max_len} occurs {min_count} times; "
            "lower the count threshold or provide a longer stream"
        )
    return DerivativeMap(table.alphabet, table.stream_length, entries)


def _is_vertex(points: np.ndarray, index: int) -> bool:
    # vertex iff the point cannot be written as a convex mix of the others
    others = np.delete(points, index, axis=0)
    target = points[index]
    a_eq = np.vstack([others.T, np.ones(others.shape[0])])
    b_eq = np.concatenate([target, [1.0]])
    res = linprog(
        np.zeros(others.shape[0]),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0.0, 1.0),
        method="highs",
    )
    return not res.success


def hull_vertex_words(derivs: DerivativeMap, decimals: int = 9) -> list:
    """Words whose derivatives lie at vertices of the derivative cloud.

    Derivatives are deduplicated to ``decimals`` places first, so a cluster of
    words sharing one extreme point all come back.  For binary alphabets the
    cloud lives on a segment and the vertex test reduces to min/max of the
    first coordinate; larger alphabets get a linear program per unique point.
    """
    entries = derivs.entries
    words = list(entries)
    points = np.array([entries[w][0] for w in words])
    keys = [tuple(np.round(p, decimals)) for p in points]
    groups: dict = {}
    for i, key in enumerate(keys):
        groups.setdefault(key, []).append(i)
    uniq = list(groups)
    if len(uniq) == 1:
        vertex_keys = uniq
    elif derivs.alphabet.size == 2:
        firsts = [key[0] for key in uniq]
        lo, hi = min(firsts), max(firsts)
        vertex_keys = [key for key in uniq if key[0] == lo or key[0] == hi]
    else:
        pts = np.array(uniq)
        vertex_keys = [key for j, key in enumerate(uniq) if _is_vertex(pts, j)]
    chosen = []
    for key in vertex_keys:
        chosen.extend(words[i] for i in groups[key])
    return chosen


@dataclass(frozen=True)
class SyncResult:
    """Selected synchronizing word with its observed statistics.

    ``frequency`` is the occurrence frequency of the word in the stream, and
    ``hull_words`` the full vertex set the word was drawn from.
    """

    word: tuple
    derivative: np.ndarray
    count: int
    frequency: float
    hull_words: tuple


def select_sync_string(derivs: DerivativeMap, vertex_words) -> SyncResult:
    """Most frequent vertex word; ties break to the lexicographically least."""
    if not vertex_words:
        raise InsufficientDataError("no synchronizing candidates to choose from")
    best = min(vertex_words, key=lambda w: (-derivs.entries[w][1], w))
    derivative, cnt = derivs.entries[best]
    return SyncResult(
        word=best,
        derivative=derivative,
        count=cnt,
        frequency=cnt / derivs.stream_length,
        hull_words=tuple(vertex_words),
    )


def find_sync_string(
    table: CountTable, max_len: int, min_count: int
) -> SyncResult:
    """Collect derivatives, take hull vertices, pick the winner."""
    derivs = collect_derivatives(table, max_len, min_count)
    return select_sync_string(derivs, hull_vertex_words(derivs))
