"""Entanglement observables on mixed stabilizer states.

All quantities reduce to GF(2) ranks of the generator matrix: entropy from
the rank restricted to a region's complement, logarithmic negativity from
half the rank of the binary anticommutation form on a half's restrictions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .gf2 import bits_to_int_rows, parity_matmul, rank_int_rows
from .pauli import support_interval
from .stabilizer import StabilizerState, canonicalize

__all__ = [
    "Bipartition",
    "entropy",
    "negativity",
    "mutual_information",
    "purity_log2",
    "ObservableRecord",
    "record_observables",
    "length_distribution",
    "window_mass",
]


@dataclass(frozen=True)
class Bipartition:
    """Two disjoint site sets; the standard split is contiguous halves."""

    region_a: Tuple[int, ...]
    region_b: Tuple[int, ...]

    def __init__(self, region_a: Iterable[int], region_b: Iterable[int]):
        a = tuple(sorted(set(region_a)))
        b = tuple(sorted(set(region_b)))
        if not a or not b:
            raise ValueError("both regions must be non-empty")
        if set(a) & set(b):
            raise ValueError("regions overlap")
        object.__setattr__(self, "region_a", a)
        object.__setattr__(self, "region_b", b)

    @classmethod
    def contiguous_halves(cls, L: int) -> "Bipartition":
        return cls(range(L // 2), range(L // 2, L))

    def joint(self) -> Tuple[int, ...]:
        return tuple(sorted(self.region_a + self.region_b))


def _region_columns(L: int, region: Sequence[int]) -> np.ndarray:
    cols = np.asarray(sorted(region), dtype=np.int64)
    if cols.size and (cols[0] < 0 or cols[-1] >= L):
        raise ValueError("region site out of range")
    return cols


def entropy(state: StabilizerState, region: Iterable[int]) -> int:
    """S_R = |R| - |G_R| with G_R the subgroup supported inside R.

    |G_R| = k - rank(generators restricted to the complement of R), so only
    one elimination is needed.
    """
    L = state.num_qubits
    cols = _region_columns(L, set(region))
    comp = np.setdiff1d(np.arange(L), cols)
    if comp.size == 0:
        return int(L - state.num_generators)
    restricted = np.concatenate([state._x[:, comp], state._z[:, comp]], axis=1)
    rank = rank_int_rows(bits_to_int_rows(restricted))
    inside = state.num_generators - rank
    return int(cols.size - inside)


def negativity(state: StabilizerState, bp: Bipartition) -> float:
    """E = rank(J)/2 where J is the anticommutation form of A-restrictions."""
    cols = _region_columns(state.num_qubits, bp.region_a)
    xa = state._x[:, cols]
    za = state._z[:, cols]
    j = parity_matmul(xa, za.T) ^ parity_matmul(za, xa.T)
    return rank_int_rows(bits_to_int_rows(j)) / 2.0


def mutual_information(state: StabilizerState, bp: Bipartition) -> int:
    return (
        entropy(state, bp.region_a)
        + entropy(state, bp.region_b)
        - entropy(state, bp.joint())
    )


def purity_log2(state: StabilizerState) -> int:
    """log2 tr rho^2 = k - L; 0 for pure states, negative otherwise."""
    return state.num_generators - state.num_qubits


@dataclass(frozen=True)
class ObservableRecord:
    time: int
    S_A: int
    S_B: int
    S_AB: int
    E: float
    I: int
    purity_log2: int

    FIELDS = ("S_A", "S_B", "S_AB", "E", "I", "purity_log2")

    def values(self) -> Tuple[float, ...]:
        return (self.S_A, self.S_B, self.S_AB, self.E, self.I, self.purity_log2)


def record_observables(
    state: StabilizerState, bp: Bipartition, time: int
) -> ObservableRecord:
    s_a = entropy(state, bp.region_a)
    s_b = entropy(state, bp.region_b)
    s_ab = entropy(state, bp.joint())
    e = negativity(state, bp)
    mi = s_a + s_b - s_ab
    if 2 * e > mi + 1e-9:
        # 2E <= I holds for stabilizer states; a violation signals an engine
        # bug, but observables are still worth recording for the post-mortem.
        warnings.warn(f"2E = {2 * e} exceeds I = {mi} at t = {time}", RuntimeWarning)
    return ObservableRecord(
        time=time,
        S_A=s_a,
        S_B=s_b,
        S_AB=s_ab,
        E=e,
        I=mi,
        purity_log2=purity_log2(state),
    )


def length_distribution(state: StabilizerState) -> np.ndarray:
    """Counts of clipped-generator lengths; index = length, size L + 1.

    Identity rows (possible in mixed states) do not contribute.
    """
    clipped = canonicalize(state)
    counts = np.zeros(state.num_qubits + 1, dtype=np.int64)
    for g in clipped.generators:
        interval = support_interval(g)
        if interval is not None:
            counts[interval[1] - interval[0] + 1] += 1
    return counts


def window_mass(counts: np.ndarray, lo_frac: float, hi_frac: float) -> float:
    """Fraction of total count with length in [lo_frac * L, hi_frac * L]."""
    L = counts.size - 1
    total = counts.sum()
    if total == 0:
        return 0.0
    lo = int(np.ceil(lo_frac * L))
    hi = int(np.floor(hi_frac * L))
    return float(counts[lo : hi + 1].sum() / total)
