"""Stream sources beyond PFSA simulation.

Three families: binary itineraries of a quadratic chaotic map under the
sign partition, i.i.d. draws from an explicit distribution, and English
text folded onto a 27-symbol alphabet.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .streams import BINARY, Alphabet, SymbolStream

__all__ = [
    "TEXT27",
    "ChaoticMapConfig",
    "chaotic_stream",
    "iid_stream",
    "normalize_text",
]

# letters a..z in order, then space at index 26
TEXT27 = Alphabet(tuple(string.ascii_lowercase) + (" ",))

_DIVERGENCE_TOL = 1e-9


@dataclass(frozen=True)
class ChaoticMapConfig:
    """Orbit parameters for the map x -> 1 - r x^2.

    The default burn-in discards the transient so emitted symbols sample
    the attractor.  For r in (0, 2] and a start inside (-1, 1) the orbit
    stays in [-1, 1].
    """

    r: float
    n: int
    x0: float = 0.1
    burn_in: int = 10_000

    def __post_init__(self):
        if not 0.0 < self.r <= 2.0:
            raise InvalidParameterError(f"map parameter must lie in (0, 2], got {self.r}")
        if not -1.0 < self.x0 < 1.0:
            raise InvalidParameterError(
                f"initial condition must lie in (-1, 1), got {self.x0}"
            )
        if self.n < 1:
            raise InvalidParameterError("output length must be positive")
        if self.burn_in < 0:
            raise InvalidParameterError("burn_in must be non-negative")


def _iterate(x: float, r: float) -> float:
    nxt = 1.0 - r * x * x
    if abs(nxt) > 1.0 + _DIVERGENCE_TOL:
        raise InvalidParameterError(
            f"map iterate diverged to {nxt}; the orbit left [-1, 1]"
        )
    return nxt


def chaotic_stream(cfg: ChaoticMapConfig) -> SymbolStream:
    """Binary itinerary of the quadratic map under the sign partition.

    Emits 1 where the iterate is non-negative, 0 otherwise, starting
    after the burn-in.  Fully deterministic.
    """
    x = cfg.x0
    for _ in range(cfg.burn_in):
        x = _iterate(x, cfg.r)
    out = np.empty(cfg.n, dtype=np.int64)
    for i in range(cfg.n):
        out[i] = 1 if x >= 0.0 else 0
        x = _iterate(x, cfg.r)
    return SymbolStream(out, BINARY)


def iid_stream(probs, n: int, seed: int = 0) -> SymbolStream:
    """Independent draws from a fixed symbol distribution."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise InvalidParameterError("distribution needs at least two symbols")
    if p.min() < 0.0 or abs(p.sum() - 1.0) > 1e-9:
        raise InvalidParameterError("probabilities must be non-negative and sum to 1")
    if n < 1:
        raise InvalidParameterError("stream length must be positive")
    if p.size == 2:
        alphabet = BINARY
    else:
        alphabet = Alphabet(tuple(str(i) for i in range(p.size)))
    rng = np.random.default_rng(seed)
    data = rng.choice(p.size, size=n, p=p / p.sum())
    return SymbolStream(data, alphabet)


def normalize_text(raw) -> SymbolStream:
    """Fold text onto 27 symbols: lowercase letters plus single spaces.

    Accepts str or bytes.  Every maximal run of non-letters becomes one
    space, and the result carries no leading or trailing space, so the
    mapping is idempotent.
    """
    if isinstance(raw, (bytes, bytearray)):
        text = bytes(raw).decode("latin-1")
    else:
        text = str(raw)
    folded = re.sub(r"[^a-z]+", " ", text.lower()).strip()
    codes = np.frombuffer(folded.encode("ascii", errors="replace"), dtype=np.uint8)
    indices = np.where(codes == ord(" "), 26, codes - ord("a")).astype(np.int64)
    return SymbolStream(indices, TEXT27)
