"""Signed Pauli strings on L sites with bit-mask storage.

A string is stored as a pair of masks (bit i of x_mask set means site i
carries X or Y content, bit i of z_mask means Z or Y) plus a sign in {+1,-1}.
The represented operator is the Hermitian canonical form

    sign * prod_i i^{x_i z_i} X_i^{x_i} Z_i^{z_i}

so Y sites carry their i factor internally and exposed signs stay real.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

__all__ = [
    "PauliString",
    "multiply",
    "phase_product",
    "commutes",
    "restrict",
    "support_interval",
]

_CHAR = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _CHAR.items()}


@dataclass(frozen=True)
class PauliString:
    num_qubits: int
    x_mask: int
    z_mask: int
    sign: int = 1

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("need at least one site")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        full = (1 << self.num_qubits) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError("mask has bits beyond the last site")
        if self.x_mask < 0 or self.z_mask < 0:
            raise ValueError("masks must be non-negative")

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls(num_qubits, 0, 0, 1)

    @classmethod
    def from_ops(cls, num_qubits: int, ops: Dict[int, str], sign: int = 1) -> "PauliString":
        """Build from {site: 'X'|'Y'|'Z'}; unlisted sites are identity."""
        x = z = 0
        for site, char in ops.items():
            if not 0 <= site < num_qubits:
                raise ValueError(f"site {site} out of range")
            xb, zb = _BITS[char]
            x |= xb << site
            z |= zb << site
        return cls(num_qubits, x, z, sign)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse e.g. '+XIZY' (site 0 is the leftmost letter)."""
        sign = 1
        if label and label[0] in "+-":
            sign = 1 if label[0] == "+" else -1
            label = label[1:]
        if not label:
            raise ValueError("empty Pauli label")
        x = z = 0
        for i, char in enumerate(label):
            if char not in _BITS:
                raise ValueError(f"bad Pauli character {char!r}")
            xb, zb = _BITS[char]
            x |= xb << i
            z |= zb << i
        return cls(len(label), x, z, sign)

    def to_label(self) -> str:
        chars = [
            _CHAR[((self.x_mask >> i) & 1, (self.z_mask >> i) & 1)]
            for i in range(self.num_qubits)
        ]
        return ("+" if self.sign > 0 else "-") + "".join(chars)

    def __str__(self) -> str:
        return self.to_label()

    @property
    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()


def _check_sizes(a: PauliString, b: PauliString):
    if a.num_qubits != b.num_qubits:
        raise ValueError("Pauli strings act on different numbers of sites")


def phase_product(a: PauliString, b: PauliString) -> Tuple[PauliString, int]:
    """Product as (hermitian_base, k) with a*b = i^k * base, k mod 4.

    The base carries sign +1; k folds in the input signs. Even k means the
    product is Hermitian (i^k = +-1), odd k means anti-Hermitian.
    """
    _check_sizes(a, b)
    full = (1 << a.num_qubits) - 1
    ax, az, bx, bz = a.x_mask, a.z_mask, b.x_mask, b.z_mask
    nax, naz, nbx, nbz = full ^ ax, full ^ az, full ^ bx, full ^ bz
    # i-exponent is +1 per site with cyclic content pair (X,Y),(Y,Z),(Z,X)
    # and -1 per anticyclic pair, from the per-site canonical-form algebra.
    plus = (ax & naz & bx & bz) | (ax & az & nbx & bz) | (nax & az & bx & nbz)
    minus = (ax & az & bx & nbz) | (nax & az & bx & bz) | (ax & naz & nbx & bz)
    k = plus.bit_count() - minus.bit_count()
    if a.sign < 0:
        k += 2
    if b.sign < 0:
        k += 2
    base = PauliString(a.num_qubits, ax ^ bx, az ^ bz, 1)
    return base, k % 4


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Operator product a*b; defined for pairs whose product is Hermitian."""
    base, k = phase_product(a, b)
    if k % 2:
        raise ValueError("product of anticommuting strings is anti-Hermitian")
    return base if k == 0 else PauliString(base.num_qubits, base.x_mask, base.z_mask, -1)


def commutes(a: PauliString, b: PauliString) -> bool:
    """Symplectic test: even overlap count means the strings commute."""
    _check_sizes(a, b)
    return ((a.x_mask & b.z_mask).bit_count() + (a.z_mask & b.x_mask).bit_count()) % 2 == 0


def restrict(a: PauliString, region: Iterable[int]) -> PauliString:
    """Clear all content outside region; sign reset to +1."""
    mask = 0
    for site in region:
        if not 0 <= site < a.num_qubits:
            raise ValueError(f"site {site} out of range")
        mask |= 1 << site
    return PauliString(a.num_qubits, a.x_mask & mask, a.z_mask & mask, 1)


def support_interval(a: PauliString) -> Optional[Tuple[int, int]]:
    """(leftmost, rightmost) sites with content, or None for the identity."""
    support = a.x_mask | a.z_mask
    if support == 0:
        return None
    return ((support & -support).bit_length() - 1, support.bit_length() - 1)
