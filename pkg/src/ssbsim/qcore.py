"""Small-dimension complex linear algebra.

States, operators and density matrices over the 2- and 4-dimensional
Hilbert spaces used by the simulator, together with the metrics every
other module relies on (purity, pure-state fidelity, trace distance).

All value types are immutable: the wrapped arrays are copied on
construction and flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ContractViolation

NORM_TOL = 1e-12
HERM_TOL = 1e-12
UNITARY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_FLOOR = -1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.setflags(write=False)
PAULI = {"I": I2, "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}


def _frozen(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != ndim:
        raise ContractViolation(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{what} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Ket:
    """Complex state vector; normalization is checked on demand."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps, 1, "Ket")
        if amps.size == 0:
            raise ContractViolation("Ket must have positive dimension")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(float(np.sum(np.abs(self.amps) ** 2)) - 1.0) <= tol

    def normalized(self) -> "Ket":
        n = self.norm()
        if n == 0.0:
            raise ContractViolation("cannot normalize the zero vector")
        return Ket(self.amps / n)

    def bra(self) -> np.ndarray:
        return self.amps.conj()

    @classmethod
    def basis(cls, index: int, dim: int = 2) -> "Ket":
        if not 0 <= index < dim:
            raise ContractViolation(f"basis index {index} out of range for dim {dim}")
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    def __repr__(self):
        return f"Ket({np.array2string(self.amps, precision=6)})"


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix acting on kets of the same dimension."""

    entries: np.ndarray
    tag: str = ""

    def __post_init__(self):
        m = _frozen(self.entries, 2, "Operator")
        if m.shape[0] != m.shape[1]:
            raise ContractViolation(f"Operator must be square, got shape {m.shape}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "Operator":
        return Operator(self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if other.dim != self.dim:
                raise ContractViolation(f"dimension mismatch: {self.dim} vs {other.dim}")
            return Operator(self.entries @ other.entries)
        if isinstance(other, Ket):
            return apply_operator(self, other)
        return NotImplemented

    def __repr__(self):
        label = f"{self.tag}, " if self.tag else ""
        return f"Operator({label}{np.array2string(self.entries, precision=6)})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries, 2, "DensityMatrix")
        if m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ContractViolation(f"DensityMatrix must be square, got shape {m.shape}")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > HERM_TOL:
            raise ContractViolation(f"DensityMatrix not Hermitian (deviation {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ContractViolation(f"DensityMatrix trace {tr.real:.15g} != 1")
        lam_min = float(np.linalg.eigvalsh(m)[0])
        if lam_min < PSD_FLOOR:
            raise ContractViolation(f"DensityMatrix has negative eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def from_ket(cls, ket: Ket) -> "DensityMatrix":
        if not ket.is_normalized():
            raise ContractViolation("density matrix of an unnormalized ket")
        return cls(np.outer(ket.amps, ket.amps.conj()))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.entries, precision=6)})"


def _entries(x) -> np.ndarray:
    if isinstance(x, (Operator, DensityMatrix)):
        return x.entries
    if isinstance(x, Ket):
        return x.amps
    return np.asarray(x)


def apply_operator(op: Operator, ket: Ket) -> Ket:
    """Matrix-vector product. The result is never renormalized."""
    if op.dim != ket.dim:
        raise ContractViolation(f"dimension mismatch: operator {op.dim}, ket {ket.dim}")
    return Ket(op.entries @ ket.amps)


def tensor_product(a: Union[Ket, Operator], b: Union[Ket, Operator]):
    """Kronecker product in the order |00>, |01>, |10>, |11>."""
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amps, b.amps))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.entries, b.entries))
    raise ContractViolation(
        f"tensor_product needs two Kets or two Operators, got {type(a).__name__} and {type(b).__name__}"
    )


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2)."""
    m = _entries(rho)
    # Tr(rho rho) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(m) ** 2))


def fidelity_pure(psi: Ket, rho: DensityMatrix) -> float:
    """<psi|rho|psi> for a normalized psi."""
    if psi.dim != rho.dim:
        raise ContractViolation(f"dimension mismatch: ket {psi.dim}, density matrix {rho.dim}")
    if not psi.is_normalized():
        raise ContractViolation("fidelity_pure needs a normalized ket")
    val = psi.amps.conj() @ rho.entries @ psi.amps
    return float(val.real)


def ray_fidelity(a: Ket, b: Ket) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.dim != b.dim:
        raise ContractViolation(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def same_ray(a: Ket, b: Ket, tol: float = NORM_TOL) -> bool:
    return abs(ray_fidelity(a, b) - 1.0) <= tol


def assert_unitary(op: Operator, tol: float = UNITARY_TOL) -> bool:
    """True iff max |(op^dagger op - I)_ij| <= tol."""
    if tol <= 0:
        raise ContractViolation("tol must be positive")
    m = op.entries
    dev = np.max(np.abs(m.conj().T @ m - np.eye(op.dim)))
    return bool(dev <= tol)


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of rho - sigma."""
    d = _entries(rho) - _entries(sigma)
    d = 0.5 * (d + d.conj().T)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(d))))


def max_abs(x) -> float:
    """Largest entry magnitude."""
    return float(np.max(np.abs(_entries(x))))
