"""Mixed stabilizer states as lists of independent commuting generators.

A state on L sites holds k <= L signed Pauli generators; the density operator
is the uniform mixture over the generated group, so purity is 2**(k-L) and no
destabilizer rows are kept. Generators are stored as unpacked 0/1 numpy rows
(one column per site) so channel updates vectorize across generators; rank
queries pack rows into ints via the gf2 module.
"""

from __future__ import annotations

import json
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .gf2 import Gf2Matrix, bits_to_int_rows, gf2_rank, parity_matmul, rank_int_rows
from .pauli import PauliString, commutes, multiply, support_interval

__all__ = [
    "StabilizerState",
    "product_state",
    "purity",
    "canonicalize",
    "validate",
    "Gf2Matrix",
    "gf2_rank",
]


class StabilizerState:
    """k independent commuting signed Pauli strings on L sites."""

    __slots__ = ("num_qubits", "_x", "_z", "_neg")

    def __init__(self, num_qubits: int, generators: Sequence[PauliString] = ()):
        if num_qubits < 1:
            raise ValueError("need at least one site")
        self.num_qubits = num_qubits
        k = len(generators)
        self._x = np.zeros((k, num_qubits), dtype=np.uint8)
        self._z = np.zeros((k, num_qubits), dtype=np.uint8)
        self._neg = np.zeros(k, dtype=np.uint8)
        for row, g in enumerate(generators):
            if g.num_qubits != num_qubits:
                raise ValueError("generator size does not match the state")
            self._set_row(row, g)

    # -- construction and views ------------------------------------------

    @classmethod
    def _from_arrays(cls, x: np.ndarray, z: np.ndarray, neg: np.ndarray) -> "StabilizerState":
        state = cls.__new__(cls)
        state.num_qubits = x.shape[1]
        state._x, state._z, state._neg = x, z, neg
        return state

    def copy(self) -> "StabilizerState":
        return StabilizerState._from_arrays(self._x.copy(), self._z.copy(), self._neg.copy())

    @property
    def num_generators(self) -> int:
        return self._x.shape[0]

    @property
    def generators(self) -> Tuple[PauliString, ...]:
        return tuple(self._row_pauli(i) for i in range(self.num_generators))

    def _row_pauli(self, row: int) -> PauliString:
        x, z = bits_to_int_rows(self._x[row])[0], bits_to_int_rows(self._z[row])[0]
        return PauliString(self.num_qubits, x, z, -1 if self._neg[row] else 1)

    def _set_row(self, row: int, g: PauliString):
        for arr, mask in ((self._x, g.x_mask), (self._z, g.z_mask)):
            as_bytes = mask.to_bytes((self.num_qubits + 7) // 8, "little")
            bits = np.unpackbits(np.frombuffer(as_bytes, dtype=np.uint8), bitorder="little")
            arr[row] = bits[: self.num_qubits]
        self._neg[row] = 1 if g.sign < 0 else 0

    def symplectic_int_rows(self) -> List[int]:
        """Each generator as the 2L-bit int x_mask | z_mask << L."""
        L = self.num_qubits
        xs = bits_to_int_rows(self._x)
        zs = bits_to_int_rows(self._z)
        return [x | (z << L) for x, z in zip(xs, zs)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerState):
            return NotImplemented
        return (
            self.num_qubits == other.num_qubits
            and self._x.shape == other._x.shape
            and bool(np.array_equal(self._x, other._x))
            and bool(np.array_equal(self._z, other._z))
            and bool(np.array_equal(self._neg, other._neg))
        )

    def __repr__(self) -> str:
        labels = ", ".join(g.to_label() for g in self.generators)
        return f"StabilizerState(L={self.num_qubits}, [{labels}])"

    # -- in-place row operations (used by the channels module) ------------

    def _multiply_rows(self, source: int, targets: np.ndarray):
        """g_t <- g_source * g_t for each target row (all pairs commute)."""
        if targets.size == 0:
            return
        ax, az = self._x[source], self._z[source]
        bx, bz = self._x[targets], self._z[targets]
        k = _phase_exponents(ax, az, bx, bz)
        if np.any(k & 1):
            raise AssertionError("row multiplication hit an anticommuting pair")
        flips = ((int(self._neg[source]) + (k >> 1)) & 1).astype(np.uint8)
        self._neg[targets] ^= flips
        self._x[targets] ^= ax
        self._z[targets] ^= az

    def _delete_rows(self, rows) -> None:
        keep = np.ones(self.num_generators, dtype=bool)
        keep[rows] = False
        self._x = self._x[keep]
        self._z = self._z[keep]
        self._neg = self._neg[keep]

    def _append_z_row(self, x_bits: np.ndarray, z_bits: np.ndarray, negative: bool):
        self._x = np.vstack([self._x, x_bits[None, :]])
        self._z = np.vstack([self._z, z_bits[None, :]])
        self._neg = np.append(self._neg, np.uint8(1 if negative else 0))

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"L": self.num_qubits, "generators": [g.to_label() for g in self.generators]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "StabilizerState":
        gens = [PauliString.from_label(label) for label in data["generators"]]
        return cls(int(data["L"]), gens)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json(cls, text: str) -> "StabilizerState":
        return cls.from_json_dict(json.loads(text))


def _phase_exponents(ax, az, bx, bz) -> np.ndarray:
    """Vector of i-exponents (mod 4) for a * b over rows b, per-site algebra."""
    nax, naz = 1 - ax, 1 - az
    nbx, nbz = 1 - bx, 1 - bz
    plus = (ax & naz & bx & bz) | (ax & az & nbx & bz) | (nax & az & bx & nbz)
    minus = (ax & az & bx & nbz) | (nax & az & bx & bz) | (ax & naz & nbx & bz)
    return (
        plus.sum(axis=-1, dtype=np.int64) - minus.sum(axis=-1, dtype=np.int64)
    ) % 4


def product_state(L: int) -> StabilizerState:
    """|0>^L: generators +Z_i, purity 1."""
    if L < 1:
        raise ValueError("need at least one site")
    state = StabilizerState.__new__(StabilizerState)
    state.num_qubits = L
    state._x = np.zeros((L, L), dtype=np.uint8)
    state._z = np.eye(L, dtype=np.uint8)
    state._neg = np.zeros(L, dtype=np.uint8)
    return state


def purity(state: StabilizerState) -> float:
    """tr rho^2 = 2**(k - L)."""
    return 2.0 ** (state.num_generators - state.num_qubits)


def validate(state: StabilizerState) -> Optional[str]:
    """None if all invariants hold, else a message naming the first violation.

    Independence over GF(2) also rules out -identity in the group: the only
    combination with identity masks is then the empty one, whose sign is +1.
    """
    k, L = state.num_generators, state.num_qubits
    if k > L:
        return f"too many generators ({k} > {L})"
    if k == 0:
        return None
    if state._x.max(initial=0) > 1 or state._z.max(initial=0) > 1:
        return "mask entries outside {0,1}"
    anti = parity_matmul(state._x, state._z.T) ^ parity_matmul(state._z, state._x.T)
    bad = np.argwhere(np.triu(anti, k=1))
    if bad.size:
        i, j = bad[0]
        return f"non-commuting generator pair ({i}, {j})"
    if rank_int_rows(state.symplectic_int_rows()) != k:
        return "dependent generator rows"
    return None


def canonicalize(state: StabilizerState) -> StabilizerState:
    """Clipped gauge via a left-to-right then right-to-left elimination sweep.

    After the sweeps each site hosts at most two generator left-endpoints and
    at most two right-endpoints; the generated signed group is unchanged and
    the map is a fixed point on its own output.
    """
    rows = list(state.generators)
    k, L = len(rows), state.num_qubits

    def bit(g: PauliString, site: int, kind: int) -> int:
        mask = g.x_mask if kind == 0 else g.z_mask
        return (mask >> site) & 1

    # Left sweep: echelon over columns (site, X-ish) then (site, Z-only),
    # eliminating below each pivot; sorts rows by left endpoint.
    r = 0
    for site in range(L):
        for kind in (0, 1):
            pivot = next((j for j in range(r, k) if bit(rows[j], site, kind)), None)
            if pivot is None:
                continue
            rows[r], rows[pivot] = rows[pivot], rows[r]
            for j in range(r + 1, k):
                if bit(rows[j], site, kind):
                    rows[j] = multiply(rows[r], rows[j])
            r += 1

    # Right sweep: walking sites right-to-left, pick per bit-kind the not yet
    # finished row with the largest left endpoint (so multiplications cannot
    # disturb any left endpoint) and clear that bit from the other unfinished
    # rows; the chosen row's right endpoint is then pinned at this site.
    def left_key(g: PauliString):
        interval = support_interval(g)
        site = interval[0] if interval else L
        return (site, 0 if (g.x_mask >> site) & 1 else 1)

    finished = [False] * k
    for site in range(L - 1, -1, -1):
        for kind in (0, 1):
            candidates = [j for j in range(k) if not finished[j] and bit(rows[j], site, kind)]
            if not candidates:
                continue
            pivot = max(candidates, key=lambda j: left_key(rows[j]))
            for j in candidates:
                if j != pivot:
                    rows[j] = multiply(rows[pivot], rows[j])
            finished[pivot] = True

    return StabilizerState(L, rows)


def clipped_endpoint_counts(state: StabilizerState) -> Tuple[np.ndarray, np.ndarray]:
    """(left_counts, right_counts) per site; identity rows are skipped."""
    left = np.zeros(state.num_qubits, dtype=np.int64)
    right = np.zeros(state.num_qubits, dtype=np.int64)
    for g in state.generators:
        interval = support_interval(g)
        if interval is not None:
            left[interval[0]] += 1
            right[interval[1]] += 1
    return left, right
