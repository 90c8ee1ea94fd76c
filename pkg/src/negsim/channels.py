"""State-update primitives: random two-qubit Cliffords, Pauli measurement,
and the single-site dephasing channel.

Clifford sampling follows the transvection construction for uniform Sp(2n,2)
elements (index -> matrix bijection), so uniformity over the 11,520 two-qubit
Cliffords mod phase reduces to a uniform index in [0, 720) plus four uniform
sign bits. Conjugation is applied through a 16-entry lookup table per gate
(local pattern on the two touched sites -> image pattern and sign flip),
vectorized across all generators of a state.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .gf2 import solve_int_rows
from .pauli import PauliString, commutes, phase_product
from .stabilizer import StabilizerState

__all__ = [
    "CliffordGate",
    "Rng",
    "make_rng",
    "trajectory_rng",
    "sample_two_qubit_clifford",
    "apply_clifford",
    "measure_pauli",
    "dephase",
    "symplectic_matrix",
    "symplectic_group_order",
]

Rng = np.random.Generator


def make_rng(seed: int) -> Rng:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def trajectory_rng(seed: int, trajectory_index: int) -> Rng:
    """Splittable per-trajectory stream: hash(seed, index) via SeedSequence."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trajectory_index,))
    return np.random.Generator(np.random.PCG64(ss))


# -- uniform symplectic sampling ------------------------------------------


def symplectic_group_order(n: int) -> int:
    order = 1 << (n * n)
    for j in range(1, n + 1):
        order *= (1 << (2 * j)) - 1
    return order


def _int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> i) & 1 for i in range(width)], dtype=np.uint8)


def _symp_inner(v: np.ndarray, w: np.ndarray) -> int:
    # pairing on adjacent columns (x1,z1),(x2,z2),...
    return int(np.sum(v[0::2] & w[1::2]) + np.sum(v[1::2] & w[0::2])) & 1


def _transvection(k: np.ndarray, v: np.ndarray) -> np.ndarray:
    if _symp_inner(k, v):
        return (v + k) % 2
    return v.copy()


def _find_transvection(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Two vectors h0, h1 with T_h0 T_h1 x = y (either may be zero)."""
    out = np.zeros((2, len(x)), dtype=np.uint8)
    if np.array_equal(x, y):
        return out
    if _symp_inner(x, y) == 1:
        out[0] = (x + y) % 2
        return out
    n = len(x) // 2
    z = np.zeros(len(x), dtype=np.uint8)
    for i in range(n):  # pair where both have content
        a, b = 2 * i, 2 * i + 1
        if (x[a] or x[b]) and (y[a] or y[b]):
            z[a] = (x[a] + y[a]) % 2
            z[b] = (x[b] + y[b]) % 2
            if z[a] == 0 and z[b] == 0:
                z[b] = 1
                if x[a] != x[b]:
                    z[a] = 1
            out[0] = (x + z) % 2
            out[1] = (y + z) % 2
            return out
    for i in range(n):  # pair where only x has content
        a, b = 2 * i, 2 * i + 1
        if (x[a] or x[b]) and not (y[a] or y[b]):
            if x[a] == x[b]:
                z[b] = 1
            else:
                z[b] = x[a]
                z[a] = x[b]
            break
    for i in range(n):  # pair where only y has content
        a, b = 2 * i, 2 * i + 1
        if (y[a] or y[b]) and not (x[a] or x[b]):
            if y[a] == y[b]:
                z[b] = 1
            else:
                z[b] = y[a]
                z[a] = y[b]
            break
    out[0] = (x + z) % 2
    out[1] = (y + z) % 2
    return out


def symplectic_matrix(index: int, n: int) -> np.ndarray:
    """index -> element of Sp(2n,2); bijective for index in [0, group order).

    Row j is the image of basis vector j in column order (x1,z1,x2,z2,...).
    """
    nn = 2 * n
    s = (1 << nn) - 1
    f1 = _int_to_bits((index % s) + 1, nn)
    index //= s
    e1 = np.zeros(nn, dtype=np.uint8)
    e1[0] = 1
    t = _find_transvection(e1, f1)
    bits = _int_to_bits(index % (1 << (nn - 1)), nn - 1)
    index //= 1 << (nn - 1)
    eprime = e1.copy()
    for j in range(2, nn):
        eprime[j] = bits[j - 1]
    h0 = _transvection(t[1], eprime)
    h0 = _transvection(t[0], h0)
    if bits[0] == 1:
        f1 = f1 * 0  # the final T_f1 degenerates to the identity
    if n == 1:
        g = np.eye(2, dtype=np.uint8)
    else:
        g = np.zeros((nn, nn), dtype=np.uint8)
        g[0, 0] = g[1, 1] = 1
        g[2:, 2:] = symplectic_matrix(index, n - 1)
    for j in range(nn):
        row = _transvection(t[1], g[j])
        row = _transvection(t[0], row)
        row = _transvection(h0, row)
        row = _transvection(f1, row)
        g[j] = row
    return g


# -- gates ------------------------------------------------------------------


@dataclass(frozen=True)
class CliffordGate:
    """Two-qubit Clifford given by the images of X1, Z1, X2, Z2."""

    images: Tuple[PauliString, PauliString, PauliString, PauliString]

    def __post_init__(self):
        if len(self.images) != 4 or any(g.num_qubits != 2 for g in self.images):
            raise ValueError("expected four images on 2 qubits")
        if any(g.is_identity for g in self.images):
            raise ValueError("image cannot be the identity")
        for a in range(4):
            for b in range(a + 1, 4):
                want_anti = (a, b) in ((0, 1), (2, 3))
                if commutes(self.images[a], self.images[b]) == want_anti:
                    raise ValueError("images violate the symplectic condition")

    @classmethod
    def from_labels(cls, x1: str, z1: str, x2: str, z2: str) -> "CliffordGate":
        return cls(tuple(PauliString.from_label(s) for s in (x1, z1, x2, z2)))


def cnot_gate() -> CliffordGate:
    """CNOT with control on the first touched site."""
    return CliffordGate.from_labels("+XX", "+ZI", "+IX", "+ZZ")


def swap_gate() -> CliffordGate:
    return CliffordGate.from_labels("+IX", "+IZ", "+XI", "+ZI")


def hadamard_on_first() -> CliffordGate:
    return CliffordGate.from_labels("+ZI", "+XI", "+IX", "+IZ")


_PARITY16 = np.array([bin(v).count("1") & 1 for v in range(16)], dtype=np.uint8)


@lru_cache(maxsize=16384)
def _conjugation_table(gate: CliffordGate) -> Tuple[np.ndarray, np.ndarray]:
    """(out, flip): local pattern idx = x_i + 2 z_i + 4 x_j + 8 z_j -> image
    pattern and sign-flip bit. Built by multiplying images factor by factor."""
    base = [PauliString.identity(2)] * 16
    exponent = [0] * 16
    for idx in range(1, 16):
        low = idx & -idx
        factor = gate.images[low.bit_length() - 1]
        rest_base, rest_k = base[idx ^ low], exponent[idx ^ low]
        prod, dk = phase_product(factor, rest_base)
        base[idx] = prod
        exponent[idx] = (rest_k + dk) % 4
    out = np.zeros(16, dtype=np.uint8)
    flip = np.zeros(16, dtype=np.uint8)
    for idx in range(16):
        xi, zi, xj, zj = idx & 1, (idx >> 1) & 1, (idx >> 2) & 1, (idx >> 3) & 1
        k = (exponent[idx] + (xi & zi) + (xj & zj)) % 4
        if k % 2:
            raise AssertionError("conjugated Pauli came out anti-Hermitian")
        b = base[idx]
        out[idx] = (
            (b.x_mask & 1)
            | ((b.z_mask & 1) << 1)
            | (((b.x_mask >> 1) & 1) << 2)
            | (((b.z_mask >> 1) & 1) << 3)
        )
        flip[idx] = k >> 1
    return out, flip


@lru_cache(maxsize=1)
def _symplectic_images_table() -> np.ndarray:
    """(720, 4, 2) masks: for each class, (x_mask, z_mask) of each image."""
    table = np.zeros((720, 4, 2), dtype=np.uint8)
    for idx in range(720):
        m = symplectic_matrix(idx, 2)
        for row in range(4):
            x_mask = m[row, 0] | (m[row, 2] << 1)
            z_mask = m[row, 1] | (m[row, 3] << 1)
            table[idx, row] = (x_mask, z_mask)
    return table


@lru_cache(maxsize=20000)
def _gate_from_class(sym_index: int, sign_bits: int) -> CliffordGate:
    masks = _symplectic_images_table()[sym_index]
    images = tuple(
        PauliString(2, int(masks[row, 0]), int(masks[row, 1]), -1 if (sign_bits >> row) & 1 else 1)
        for row in range(4)
    )
    return CliffordGate(images)


@lru_cache(maxsize=1)
def _class_tables() -> Tuple[np.ndarray, np.ndarray]:
    """Stacked sign-free conjugation tables for all 720 classes."""
    out = np.zeros((720, 16), dtype=np.uint8)
    flip = np.zeros((720, 16), dtype=np.uint8)
    for idx in range(720):
        out[idx], flip[idx] = _conjugation_table(_gate_from_class(idx, 0))
    return out, flip


def sample_two_qubit_clifford(rng: Rng) -> CliffordGate:
    """Uniform over the two-qubit Clifford group modulo global phase."""
    sym_index = int(rng.integers(720))
    sign_bits = int(rng.integers(16))
    return _gate_from_class(sym_index, sign_bits)


# -- channel applications ----------------------------------------------------


def _check_site(state: StabilizerState, site: int):
    if not 0 <= site < state.num_qubits:
        raise ValueError(f"site {site} out of range for L={state.num_qubits}")


def apply_clifford(state: StabilizerState, gate: CliffordGate, i: int, j: int) -> StabilizerState:
    """Conjugate every generator by the gate acting on sites (i, j)."""
    _check_site(state, i)
    _check_site(state, j)
    if i == j:
        raise ValueError("gate sites must differ")
    out = state.copy()
    table_out, table_flip = _conjugation_table(gate)
    _apply_tables_inplace(out, table_out[None, :], table_flip[None, :], [i], [j])
    return out


def _apply_tables_inplace(state, table_out, table_flip, cols_i, cols_j):
    """Apply one gate per (cols_i[m], cols_j[m]) pair; tables are (m, 16)."""
    xi = state._x[:, cols_i]
    zi = state._z[:, cols_i]
    xj = state._x[:, cols_j]
    zj = state._z[:, cols_j]
    idx = xi | (zi << 1) | (xj << 2) | (zj << 3)
    sel = np.arange(len(cols_i))[None, :]
    res = table_out[sel, idx]
    flips = table_flip[sel, idx]
    state._x[:, cols_i] = res & 1
    state._z[:, cols_i] = (res >> 1) & 1
    state._x[:, cols_j] = (res >> 2) & 1
    state._z[:, cols_j] = (res >> 3) & 1
    state._neg ^= (flips.sum(axis=1, dtype=np.int64) & 1).astype(np.uint8)


def _mask_to_bits(mask: int, width: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((width + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:width]


def measure_pauli(
    state: StabilizerState, h: PauliString, rng: Rng
) -> Tuple[int, StabilizerState]:
    """Projective measurement of a Hermitian Pauli; returns (outcome, state).

    Cases: (a) +-h in the group -> deterministic outcome, state unchanged;
    (b) h anticommutes with some generator -> uniform outcome, row update;
    (c) h commutes but is outside the group -> uniform outcome, appended.
    """
    if h.num_qubits != state.num_qubits:
        raise ValueError("operator size does not match the state")
    if h.is_identity:
        raise ValueError("cannot measure the identity string")
    out = state.copy()
    outcome = _measure_inplace(out, h, rng, need_outcome=True)
    return outcome, out


def _uniform_outcome(rng: Rng) -> int:
    return 1 if int(rng.integers(2)) == 0 else -1


def _measure_inplace(
    state: StabilizerState, h: PauliString, rng: Rng, need_outcome: bool
) -> Optional[int]:
    L = state.num_qubits
    hx = _mask_to_bits(h.x_mask, L)
    hz = _mask_to_bits(h.z_mask, L)
    overlap = (state._x & hz).sum(axis=1, dtype=np.int64)
    overlap += (state._z & hx).sum(axis=1, dtype=np.int64)
    anti = np.nonzero(overlap & 1)[0]
    if anti.size:  # case (b)
        state._multiply_rows(anti[0], anti[1:])
        outcome = _uniform_outcome(rng)
        row = anti[0]
        state._x[row] = hx
        state._z[row] = hz
        state._neg[row] = (1 if outcome < 0 else 0) ^ (1 if h.sign < 0 else 0)
        return outcome
    target = h.x_mask | (h.z_mask << L)
    combo = solve_int_rows(state.symplectic_int_rows(), target)
    if combo is None:  # case (c)
        outcome = _uniform_outcome(rng)
        state._append_z_row(hx, hz, (outcome < 0) ^ (h.sign < 0))
        return outcome
    if not need_outcome:  # case (a): state unchanged either way
        return None
    return _group_element_sign(state, combo) * h.sign


def _group_element_sign(state: StabilizerState, combo: int) -> int:
    """Sign of the group element given by a combination bitmask over rows."""
    acc = PauliString.identity(state.num_qubits)
    k_total = 0
    row = 0
    while combo:
        if combo & 1:
            acc, dk = phase_product(acc, state._row_pauli(row))
            k_total = (k_total + dk) % 4
        combo >>= 1
        row += 1
    if k_total % 2:
        raise AssertionError("group element sign came out imaginary")
    return 1 if k_total == 0 else -1


def _measure_z_inplace(
    state: StabilizerState, site: int, rng: Rng, need_outcome: bool
) -> Optional[int]:
    """Runner fast path for h = Z_site; rng use matches _measure_inplace.

    When Z_site commutes with every generator and k = L, membership in the
    group is automatic (a maximal stabilizer group is its own centralizer up
    to phase), so the elimination is skipped unless the outcome is needed.
    """
    L = state.num_qubits
    anti = np.nonzero(state._x[:, site])[0]
    if anti.size:  # case (b)
        state._multiply_rows(anti[0], anti[1:])
        outcome = _uniform_outcome(rng)
        row = anti[0]
        state._x[row] = 0
        state._z[row] = 0
        state._z[row, site] = 1
        state._neg[row] = 1 if outcome < 0 else 0
        return outcome
    target = 1 << (L + site)
    if state.num_generators == L:
        if not need_outcome:
            return None
        combo = solve_int_rows(state.symplectic_int_rows(), target)
        if combo is None:
            raise AssertionError("full-rank state missing a commuting Z row")
        return _group_element_sign(state, combo)
    combo = solve_int_rows(state.symplectic_int_rows(), target)
    if combo is None:  # case (c)
        outcome = _uniform_outcome(rng)
        x_bits = np.zeros(L, dtype=np.uint8)
        z_bits = np.zeros(L, dtype=np.uint8)
        z_bits[site] = 1
        state._append_z_row(x_bits, z_bits, outcome < 0)
        return outcome
    if not need_outcome:  # case (a)
        return None
    return _group_element_sign(state, combo)


def dephase(state: StabilizerState, site: int) -> StabilizerState:
    """Computational-basis dephasing channel on one site.

    Row-reduces so at most one generator anticommutes with Z_site and deletes
    it (purity halves); a state with no anticommuting generator is unaffected.
    """
    _check_site(state, site)
    out = state.copy()
    _dephase_inplace(out, site)
    return out


def _dephase_inplace(state: StabilizerState, site: int):
    anti = np.nonzero(state._x[:, site])[0]
    if anti.size == 0:
        return
    state._multiply_rows(anti[0], anti[1:])
    state._delete_rows([anti[0]])
