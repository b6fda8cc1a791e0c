"""Pauli strings on a chain and on the rung-merged (bra/ket) ladder.

Phases are kept exactly as a power of ``1j`` (an int mod 4) so that
commutation checks never depend on floating point.  Site 0 is the most
significant tensor factor in every dense representation, and a ladder rung
|u, l> is stored at index ``2*u + l``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

DENSE_LIMIT = 13

AXES = ("I", "X", "Y", "Z")

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (power of 1j, axis) for the single-site product a*b
_PRODUCT = {}
for _a in AXES:
    _PRODUCT["I", _a] = (0, _a)
    _PRODUCT[_a, "I"] = (0, _a)
for _a in "XYZ":
    _PRODUCT[_a, _a] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[_a, _b] = (1, _c)
    _PRODUCT[_b, _a] = (3, _c)

_PHASES = (1, 1j, -1, -1j)


def _check_axis(axis: str) -> str:
    if axis not in PAULI_MATRICES:
        raise ValueError(f"unknown Pauli axis {axis!r}")
    return axis


@dataclass(frozen=True)
class PauliString:
    """A signed product ``1j**phase * P_0 x P_1 x ... x P_{L-1}``."""

    factors: tuple[str, ...]
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(_check_axis(a) for a in self.factors))
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def identity(cls, length: int) -> "PauliString":
        return cls(("I",) * length)

    @classmethod
    def from_sites(cls, length: int, sites: Mapping[int, str], phase: int = 0) -> "PauliString":
        """Build a string from a ``{site: axis}`` map; unlisted sites are identity."""
        factors = ["I"] * length
        for site, axis in sites.items():
            if not 0 <= site < length:
                raise ValueError(f"site {site} outside chain of length {length}")
            factors[site] = axis
        return cls(tuple(factors), phase)

    @property
    def length(self) -> int:
        return len(self.factors)

    @property
    def coefficient(self) -> complex:
        return _PHASES[self.phase]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, a in enumerate(self.factors) if a != "I")

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self) -> str:
        sign = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        body = " ".join(f"{a}{j}" for j, a in enumerate(self.factors) if a != "I")
        return f"{sign}{body or 'I'}"

    def commutes_with(self, other: "PauliString") -> bool:
        _check_lengths(self, other)
        clashes = sum(
            1 for a, b in zip(self.factors, other.factors) if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def anticommutes_with(self, other: "PauliString") -> bool:
        return not self.commutes_with(other)

    def is_real(self) -> bool:
        """True when the dense matrix has only real entries."""
        n_y = sum(1 for a in self.factors if a == "Y")
        return (self.phase + n_y) % 2 == 0

    def conj(self) -> "PauliString":
        # Y* = -Y, and (1j**k)* = 1j**(-k)
        n_y = sum(1 for a in self.factors if a == "Y")
        return PauliString(self.factors, -self.phase + 2 * n_y)

    def local_matrices(self) -> list[np.ndarray]:
        """Per-site 2x2 factors with the global phase folded into site 0."""
        mats = [PAULI_MATRICES[a].copy() for a in self.factors]
        if mats:
            mats[0] = mats[0] * self.coefficient
        return mats


def _check_lengths(a: PauliString, b: PauliString) -> None:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Return the product ``a @ b`` with its exact phase."""
    _check_lengths(a, b)
    phase = a.phase + b.phase
    factors = []
    for x, y in zip(a.factors, b.factors):
        k, c = _PRODUCT[x, y]
        phase += k
        factors.append(c)
    return PauliString(tuple(factors), phase)


def to_dense(op: PauliString, length: int | None = None) -> np.ndarray:
    """Dense ``2**L`` matrix of a Pauli string (site 0 most significant)."""
    length = op.length if length is None else length
    if length != op.length:
        raise ValueError(f"string has {op.length} sites, asked for {length}")
    if length > DENSE_LIMIT:
        raise ValueError(f"L={length} exceeds the dense limit {DENSE_LIMIT}")
    out = np.array([[op.coefficient]], dtype=complex)
    for a in op.factors:
        out = np.kron(out, PAULI_MATRICES[a])
    return out


def rung_gate(upper: str, lower: str) -> np.ndarray:
    """4x4 matrix ``upper (x) lower`` in the rung basis ``2*u + l``."""
    return np.kron(PAULI_MATRICES[_check_axis(upper)], PAULI_MATRICES[_check_axis(lower)])


@dataclass(frozen=True)
class LadderOperator:
    """Operator acting as ``upper (x) lower`` on each rung of the doubled chain.

    Both strings act literally.  A channel-style superoperator ``O* (x) O``
    is built with :meth:`conjugate_pair`, which conjugates the upper factor.
    """

    upper: PauliString
    lower: PauliString

    def __post_init__(self):
        _check_lengths(self.upper, self.lower)

    @classmethod
    def conjugate_pair(cls, op: PauliString) -> "LadderOperator":
        return cls(op.conj(), op)

    @classmethod
    def upper_only(cls, op: PauliString) -> "LadderOperator":
        return cls(op, PauliString.identity(op.length))

    @classmethod
    def lower_only(cls, op: PauliString) -> "LadderOperator":
        return cls(PauliString.identity(op.length), op)

    @property
    def length(self) -> int:
        return self.upper.length

    @property
    def coefficient(self) -> complex:
        return self.upper.coefficient * self.lower.coefficient

    def is_real(self) -> bool:
        # Y = i * (real matrix), so only the total count of i factors matters
        n_y = sum(1 for a in self.upper.factors + self.lower.factors if a == "Y")
        return (self.upper.phase + self.lower.phase + n_y) % 2 == 0

    def rung_gates(self) -> list[np.ndarray]:
        """Per-rung 4x4 gates; the global phase sits on rung 0."""
        gates = [rung_gate(u, l) for u, l in zip(self.upper.factors, self.lower.factors)]
        if gates:
            gates[0] = gates[0] * self.coefficient
        return gates

    def __mul__(self, other: "LadderOperator") -> "LadderOperator":
        return LadderOperator(multiply(self.upper, other.upper), multiply(self.lower, other.lower))


def string(length: int, spec: str | Iterable[tuple[int, str]], phase: int = 0) -> PauliString:
    """Shorthand constructor: ``string(5, "X0 Z1")`` or ``string(5, [(0, "X")])``."""
    if isinstance(spec, str):
        pairs = [(int(tok[1:]), tok[0]) for tok in spec.split()]
    else:
        pairs = list(spec)
    sites: dict[int, str] = {}
    ph = phase
    for site, axis in pairs:
        prev = sites.get(site, "I")
        k, c = _PRODUCT[prev, _check_axis(axis)]
        ph += k
        sites[site] = c
    return PauliString.from_sites(length, sites, ph)


def assert_real_ladder(ops: Iterable[LadderOperator]) -> None:
    """Raise if any operator would inject an imaginary factor into the doubled space."""
    for op in ops:
        if not op.is_real():
            raise ValueError(f"complex ladder operator: upper={op.upper}, lower={op.lower}")
