"""Sequential probability assignment over joint (pattern, bin) sequences.

Each bin starts with its total mass phi_b.  A re-occurrence of a known index
costs the bin's per-letter rate rho_b; a new index occurring in bin b receives
the bin's remaining first-occurrence mass phi_b - seen_b * rho_b.  For bins 0
and 1 the rate is the optimized (n*phi_b - L_b)/(n * min(k_b, n)), which keeps
the first-occurrence mass positive throughout; higher bins use phi_b / k_b.

The assignment is sub-stochastic by construction (mass reserved for new
occurrences in a bin whose letters are all seen is never claimable), which is
exactly what makes its expected codelength dominate the joint entropy.  The
arithmetic coder in this module realizes the assignment exactly: interval
arithmetic is done on integers (every float is a dyadic rational), so the
emitted length is within 2 bits of -log2 Q on every sequence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .distributions import ParamVector
from .grids import Grid, bin_stats

__all__ = [
    "CoderModel", "CoderState", "Bitstring", "DecodeError",
    "next_symbol_prob", "sequence_codelength", "encode", "decode",
]


class DecodeError(ValueError):
    """The bitstream is not a canonical encoding under the given model."""


@dataclass(frozen=True)
class CoderModel:
    """Frozen per-bin parameters of the probability assignment."""

    n: int
    phi: np.ndarray
    rho: np.ndarray
    kbins: np.ndarray
    ell: np.ndarray
    L: np.ndarray
    grid: Grid | None = None

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        if np.any(rho < 0.0):
            raise ValueError("per-letter rates must be non-negative")
        for b in (0, 1):
            if b < len(phi) and self.kbins[b] > 0:
                remaining = phi[b] - (self.ell[b] - 1) * rho[b]
                if remaining <= 0.0:
                    raise ValueError(
                        f"bin {b}: rate leaves no first-occurrence mass ({remaining})"
                    )
        phi.setflags(write=False)
        rho.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_source(cls, theta: ParamVector, grid: Grid, n: int) -> "CoderModel":
        """Build the model for a known source over an eta grid."""
        if n != grid.n:
            raise ValueError(f"grid was built for n={grid.n}, not {n}")
        stats = bin_stats(grid, theta)
        nbins = grid.num_bins
        rho = np.zeros(nbins, dtype=float)
        for b in range(nbins):
            kb = int(stats.counts[b])
            if kb == 0:
                continue
            if b <= 1:
                rho[b] = (n * stats.phi[b] - stats.L[b]) / (n * stats.ell[b])
            else:
                rho[b] = stats.phi[b] / kb
        return cls(n=n, phi=stats.phi.copy(), rho=rho, kbins=stats.counts.copy(),
                   ell=stats.ell.copy(), L=stats.L.copy(), grid=grid)

    @property
    def num_bins(self) -> int:
        return len(self.phi)


@dataclass
class CoderState:
    """Mutable per-stream state: which indices occurred, and with which bin."""

    index_to_bin: dict[int, int] = field(default_factory=dict)
    seen_per_bin: dict[int, int] = field(default_factory=dict)

    @property
    def max_index(self) -> int:
        return len(self.index_to_bin)

    def copy(self) -> "CoderState":
        return CoderState(dict(self.index_to_bin), dict(self.seen_per_bin))

    def update(self, psi_j: int, beta_j: int) -> None:
        """Record one (index, bin) step; the step must be legal for the state."""
        if psi_j == self.max_index + 1:
            self.index_to_bin[psi_j] = beta_j
            self.seen_per_bin[beta_j] = self.seen_per_bin.get(beta_j, 0) + 1
        elif psi_j > self.max_index + 1:
            raise ValueError(f"pattern index {psi_j} skips ahead of {self.max_index + 1}")
        # re-occurrences change nothing


def next_symbol_prob(model: CoderModel, state: CoderState, psi_j: int, beta_j: int) -> float:
    """Probability assigned to the next (index, bin) pair given the state.

    A previously seen pair costs rho of its bin; a fresh index receives the
    bin's remaining first-occurrence mass; everything else has probability 0.
    """
    if not 0 <= beta_j < model.num_bins:
        raise ValueError(f"bin {beta_j} outside the model's {model.num_bins} bins")
    if psi_j > state.max_index + 1:
        raise ValueError(f"pattern index {psi_j} skips ahead of {state.max_index + 1}")
    known_bin = state.index_to_bin.get(psi_j)
    if known_bin is not None:
        return float(model.rho[beta_j]) if known_bin == beta_j else 0.0
    # psi_j == max_index + 1: first occurrence
    seen = state.seen_per_bin.get(beta_j, 0)
    mass = float(model.phi[beta_j]) - seen * float(model.rho[beta_j])
    if mass < 0.0:
        warnings.warn(f"new-occurrence mass clamped to 0 in bin {beta_j}")
        return 0.0
    return mass


def sequence_codelength(model: CoderModel, psi, beta) -> float:
    """-log2 of the assigned probability of (psi, beta), in bits.

    Returns inf when some step has probability zero; the offending position is
    reported in a warning.
    """
    psi = tuple(psi)
    beta = tuple(beta)
    if len(psi) != len(beta):
        raise ValueError("pattern and bin sequence lengths differ")
    state = CoderState()
    bits = 0.0
    for j, (p, b) in enumerate(zip(psi, beta)):
        q = next_symbol_prob(model, state, p, b)
        if q <= 0.0:
            warnings.warn(f"zero-probability step at position {j}")
            return math.inf
        bits -= math.log2(q)
        state.update(p, b)
    return bits


@dataclass(frozen=True)
class Bitstring:
    """A bit sequence packed big-endian (first bit = MSB of the first byte)."""

    data: bytes
    nbits: int

    def __post_init__(self):
        if self.nbits < 0 or len(self.data) != (self.nbits + 7) // 8:
            raise ValueError("byte payload does not match the bit count")

    def __len__(self) -> int:
        return self.nbits

    def to01(self) -> str:
        whole = bin(int.from_bytes(self.data, "big"))[2:].zfill(8 * len(self.data))
        return whole[: self.nbits]

    @classmethod
    def from01(cls, s: str) -> "Bitstring":
        nbits = len(s)
        nbytes = (nbits + 7) // 8
        value = int(s, 2) if nbits else 0
        return cls((value << (8 * nbytes - nbits)).to_bytes(nbytes, "big"), nbits)

    def _value(self) -> int:
        """The bits as an integer (padding stripped); padding must be zero."""
        raw = int.from_bytes(self.data, "big")
        pad = 8 * len(self.data) - self.nbits
        if raw & ((1 << pad) - 1):
            raise DecodeError("non-zero padding bits")
        return raw >> pad


def _dyadic(x: float) -> tuple[int, int]:
    """Exact (numerator, shift) with x = num / 2**shift, num odd."""
    m, e = math.frexp(x)
    num = int(m * (1 << 53))
    shift = 53 - e
    strip = (num & -num).bit_length() - 1
    return num >> strip, shift - strip


def _step_events(model: CoderModel, state: CoderState) -> list[tuple[int, int, float]]:
    """Positive-probability events at a state: (psi, beta, prob), fixed order."""
    events = []
    for idx in range(1, state.max_index + 1):
        b = state.index_to_bin[idx]
        q = float(model.rho[b])
        if q > 0.0:
            events.append((idx, b, q))
    new_index = state.max_index + 1
    for b in range(model.num_bins):
        seen = state.seen_per_bin.get(b, 0)
        mass = float(model.phi[b]) - seen * float(model.rho[b])
        if mass > 0.0:
            events.append((new_index, b, mass))
    return events


def _event_weights(events: list[tuple[int, int, float]]) -> tuple[list[int], int]:
    """Integer event weights over a common denominator.

    The denominator is 2**s for the common dyadic scale s, enlarged to the
    exact weight total if float rounding pushed the total above 1; relative
    widths then stay exact and the normalization cost is ~1 ulp per step.
    """
    dy = [_dyadic(q) for _, _, q in events]
    s = max(shift for _, shift in dy)
    weights = [num << (s - shift) for num, shift in dy]
    den = 1 << s
    total = sum(weights)
    return weights, max(den, total)


def encode(model: CoderModel, psi, beta) -> Bitstring:
    """Arithmetic-code (psi, beta) under the model's assignment.

    Every step must have strictly positive probability (true for sequences the
    source can emit).  The emitted length is at most -log2 Q + 2 bits.
    """
    psi = tuple(int(p) for p in psi)
    beta = tuple(int(b) for b in beta)
    if len(psi) != len(beta) or not psi:
        raise ValueError("need non-empty (psi, beta) of equal length")
    low, width, P = 0, 1, 1
    state = CoderState()
    for j, (p, b) in enumerate(zip(psi, beta)):
        events = _step_events(model, state)
        weights, den = _event_weights(events)
        cum = 0
        target = None
        for (ep, eb, _), w in zip(events, weights):
            if ep == p and eb == b:
                target = (cum, w)
                break
            cum += w
        if target is None:
            raise ValueError(f"zero-probability step at position {j}: ({p}, {b})")
        cum_lo, w = target
        low = low * den + cum_lo * width
        width = width * w
        P = P * den
        state.update(p, b)
    # smallest L with width * 2**(L-1) >= P, then the canonical dyadic inside
    q = -(-P // width)
    L = (q - 1).bit_length() + 1
    c_num = (low * (1 << L) + P - 1) // P
    nbytes = (L + 7) // 8
    data = (c_num << (8 * nbytes - L)).to_bytes(nbytes, "big")
    return Bitstring(data, L)


def decode(model: CoderModel, bits: Bitstring, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Invert :func:`encode`; length n is conveyed out of band.

    Raises DecodeError when the stream is not the canonical encoding of any
    length-n (psi, beta) under this model.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    L = bits.nbits
    if L < 1:
        raise DecodeError("empty bitstream")
    c_num = bits._value()
    low, width, P = 0, 1, 1
    state = CoderState()
    psi: list[int] = []
    beta: list[int] = []
    for _ in range(n):
        events = _step_events(model, state)
        weights, den = _event_weights(events)
        cums = [0]
        for w in weights:
            cums.append(cums[-1] + w)
        lhs = c_num * P * den
        scale = 1 << L
        # largest event start not exceeding the code point
        lo_idx, hi_idx = 0, len(events) - 1
        while lo_idx < hi_idx:
            mid = (lo_idx + hi_idx + 1) // 2
            if (low * den + cums[mid] * width) * scale <= lhs:
                lo_idx = mid
            else:
                hi_idx = mid - 1
        t = lo_idx
        new_low = low * den + cums[t] * width
        new_width = width * weights[t]
        if (new_low + new_width) * scale <= lhs:
            raise DecodeError("code point escapes every event interval")
        low, width, P = new_low, new_width, P * den
        p, b, _ = events[t]
        psi.append(p)
        beta.append(b)
        state.update(p, b)
    if (c_num + 1) * P > (low + width) * (1 << L) or c_num * P < low * (1 << L):
        raise DecodeError("bitstream is not contained in the decoded interval")
    if encode(model, psi, beta) != bits:
        raise DecodeError("bitstream is not the canonical encoding of its decode")
    return tuple(psi), tuple(beta)
