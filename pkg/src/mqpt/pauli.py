"""n-qubit Pauli operator bases, density-matrix vectorization, and the
basis-change unitary between the Pauli and column-stacking pictures.

Two vectorization conventions are used throughout this package:

* ``pauli`` -- expansion coefficients ``Tr[P_k rho]`` over the tensor
  Pauli basis, with no ``1/d`` prefactor.  A single-qubit unit-trace state
  maps to ``(1, x, y, z)`` with ``(x, y, z)`` its Bloch vector, which keeps
  the entries of transfer matrices of physical channels inside ``[-1, 1]``.
* ``column_stacking`` -- the columns of ``rho`` stacked top to bottom,
  ``(rho_11, rho_21, ..., rho_12, ...)``, the convention in which Liouville
  superoperators act.

The Pauli basis is ordered tensor-lexicographically over ``(I, X, Y, Z)``:
``P_0 = I...I`` through ``P_{4^n - 1} = Z...Z``.  Qubit 0 is the least
significant position, i.e. the rightmost Kronecker factor, matching the
usual little-endian labeling of computational basis states.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

_SINGLE_QUBIT_PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_SINGLE_QUBIT_LABELS = "IXYZ"


class Convention(enum.Enum):
    """Vectorization convention for density matrices."""

    PAULI = "pauli"
    COLUMN_STACKING = "column_stacking"


@dataclass(frozen=True)
class PauliBasis:
    """Ordered n-qubit Pauli basis.

    ``operators`` has shape ``(4**n, 2**n, 2**n)``; element ``k`` is the
    Kronecker product whose factors are the base-4 digits of ``k`` read
    from most significant (qubit n-1) to least significant (qubit 0).
    """

    n: int
    operators: np.ndarray

    @property
    def dim(self) -> int:
        """Hilbert-space dimension ``d = 2**n``."""
        return 2**self.n

    def label(self, k: int) -> str:
        """Letter string such as ``'XY'`` (qubit 1 letter first) for index ``k``."""
        digits = []
        for _ in range(self.n):
            digits.append(_SINGLE_QUBIT_LABELS[k % 4])
            k //= 4
        return "".join(reversed(digits))


@dataclass(frozen=True)
class DensityVector:
    """A vectorized density matrix together with its convention.

    Coefficients are real in the Pauli convention (for Hermitian input)
    and complex in the column-stacking convention.
    """

    coefficients: np.ndarray
    convention: Convention

    @property
    def dim(self) -> int:
        """Dimension ``d`` of the underlying matrix."""
        return int(round(np.sqrt(self.coefficients.size)))


@dataclass(frozen=True)
class BasisChangeUnitary:
    """The unitary mapping normalized vectorized Paulis to computational
    basis vectors; conjugation by it converts transfer matrices between the
    Pauli and column-stacking pictures."""

    n: int
    matrix: np.ndarray


@functools.lru_cache(maxsize=None)
def _pauli_stack(n: int) -> np.ndarray:
    if n == 1:
        stack = _SINGLE_QUBIT_PAULIS.copy()
    else:
        prev = _pauli_stack(n - 1)
        stack = np.einsum("iab,jcd->ijacbd", prev, _SINGLE_QUBIT_PAULIS)
        stack = stack.reshape(4**n, 2**n, 2**n)
    stack.flags.writeable = False
    return stack


def pauli_basis(n: int) -> PauliBasis:
    """Build the ordered n-qubit Pauli basis.

    All ``4**n`` operators are Hermitian, unitary, square to the identity,
    and are pairwise trace-orthogonal with ``Tr[P_i P_j] = d delta_ij``.
    Entries are exactly in ``{0, +-1, +-1j}``.
    """
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    return PauliBasis(n=n, operators=_pauli_stack(n))


def _check_square_power_of_two(rho: np.ndarray) -> int:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    d = rho.shape[0]
    if d < 2 or d & (d - 1) != 0:
        raise ValueError(f"dimension must be a power of 2, got {d}")
    return int(d).bit_length() - 1


def vectorize(rho: np.ndarray, convention: Convention | str = Convention.PAULI) -> DensityVector:
    """Vectorize a ``d x d`` matrix in the requested convention.

    Column stacking puts the columns of ``rho`` top to bottom.  The Pauli
    convention returns ``Tr[P_k rho]`` for each basis operator; a
    single-qubit ``|0><0|`` gives ``(1, 0, 0, 1)``.
    """
    convention = Convention(convention)
    rho = np.asarray(rho, dtype=complex)
    n = _check_square_power_of_two(rho)
    if convention is Convention.COLUMN_STACKING:
        coeffs = rho.reshape(-1, order="F").copy()
    else:
        coeffs = np.einsum("kab,ba->k", _pauli_stack(n), rho)
        if np.abs(coeffs.imag).max() < 1e-12:
            coeffs = coeffs.real.copy()
    return DensityVector(coefficients=coeffs, convention=convention)


def devectorize(vec: DensityVector) -> np.ndarray:
    """Invert :func:`vectorize`; exact in both conventions."""
    coeffs = np.asarray(vec.coefficients)
    size = coeffs.size
    d = int(round(np.sqrt(size)))
    if d * d != size or d < 2 or d & (d - 1) != 0:
        raise ValueError(f"invalid vector length {size}: must be 4**n")
    if vec.convention is Convention.COLUMN_STACKING:
        return coeffs.reshape(d, d, order="F").copy()
    n = int(d).bit_length() - 1
    # rho = (1/d) sum_k c_k P_k, the dual expansion to Tr[P_k rho].
    return np.tensordot(coeffs, _pauli_stack(n), axes=(0, 0)) / d


@functools.lru_cache(maxsize=None)
def _basis_change_matrix(n: int) -> np.ndarray:
    d = 2**n
    stack = _pauli_stack(n)
    # Row k is the conjugated column-stacked Pauli P_k, normalized by 1/sqrt(d).
    u = stack.transpose(0, 2, 1).reshape(4**n, d * d).conj() / np.sqrt(d)
    u.flags.writeable = False
    return u


def basis_change_unitary(n: int) -> BasisChangeUnitary:
    """Unitary with rows ``<<P_k| / sqrt(d)`` in column-stacking order.

    Conjugation by it maps a Pauli transfer matrix to the Liouville
    superoperator acting on column-stacked states.
    """
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    return BasisChangeUnitary(n=n, matrix=_basis_change_matrix(n))
