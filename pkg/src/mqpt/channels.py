"""Quantum channel representations and conversions.

Three equivalent representations of an n-qubit channel are used:

* Pauli transfer matrix (PTM) -- a real ``d^2 x d^2`` matrix acting on
  Pauli-convention density vectors.  Physical channels have entries in
  ``[-1, 1]``; trace preservation pins the first row to ``(1, 0, ..., 0)``
  and unitary channels give orthogonal matrices.
* Liouville superoperator -- a complex matrix acting on column-stacked
  density vectors, obtained from the PTM by conjugation with the
  basis-change unitary.
* Choi matrix -- unnormalized convention with ``Tr C = d`` for
  trace-preserving channels; the first tensor factor is the channel input
  and the second the output, so ``R_ij = Tr[C (P_j^T kron P_i)] / d``.

The error matrix of a gate is the PTM-basis difference between the actual
channel and its unitary target; it is generally not a channel itself (its
first row vanishes when both are trace preserving).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import (
    Convention,
    DensityVector,
    _basis_change_matrix,
    _check_square_power_of_two,
    _pauli_stack,
)

_IMAG_RESIDUE_TOL = 1e-10


def _check_superoperator_shape(matrix: np.ndarray, n: int, what: str) -> None:
    dim = 4**n
    if matrix.shape != (dim, dim):
        raise ValueError(f"{what} for n={n} must have shape {(dim, dim)}, got {matrix.shape}")


@dataclass(frozen=True)
class PauliTransferMatrix:
    """Real ``d^2 x d^2`` transfer matrix in the Pauli basis."""

    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=float)
        _check_superoperator_shape(matrix, self.n, "PTM")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        """Superoperator dimension ``d^2``."""
        return 4**self.n


@dataclass(frozen=True)
class ErrorMatrix:
    """PTM-basis difference between an actual channel and its target."""

    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=float)
        _check_superoperator_shape(matrix, self.n, "error matrix")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return 4**self.n


@dataclass(frozen=True)
class LiouvilleSuperoperator:
    """Complex superoperator acting on column-stacked density vectors."""

    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=complex)
        _check_superoperator_shape(matrix, self.n, "Liouville superoperator")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return 4**self.n


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix, unnormalized so that CPTP channels have trace ``d``."""

    n: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=complex)
        _check_superoperator_shape(matrix, self.n, "Choi matrix")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return 4**self.n


@dataclass(frozen=True)
class CPTPReport:
    """Outcome of a complete-positivity / trace-preservation check.

    ``min_eigenvalue`` is the smallest Choi eigenvalue (negative values
    signal CP violation); ``tp_residual`` is the max-abs deviation of the
    output-side partial trace from the identity.
    """

    ok: bool
    min_eigenvalue: float
    tp_residual: float

    def __bool__(self) -> bool:
        return self.ok


def _cast_real(matrix: np.ndarray, what: str) -> np.ndarray:
    residue = float(np.abs(matrix.imag).max()) if np.iscomplexobj(matrix) else 0.0
    if residue >= _IMAG_RESIDUE_TOL:
        raise ValueError(
            f"{what} has imaginary residue {residue:.3e} >= {_IMAG_RESIDUE_TOL:.0e}; "
            "this usually indicates a convention mismatch"
        )
    return np.real(matrix).copy()


def liouville_from_ptm(ptm: PauliTransferMatrix) -> LiouvilleSuperoperator:
    """Conjugate a PTM into the column-stacking picture."""
    u = _basis_change_matrix(ptm.n)
    return LiouvilleSuperoperator(n=ptm.n, matrix=u.conj().T @ ptm.matrix @ u)


def ptm_from_liouville(sup: LiouvilleSuperoperator) -> PauliTransferMatrix:
    """Inverse of :func:`liouville_from_ptm`.

    The result of a physical superoperator is real; an imaginary residue
    above 1e-10 is rejected rather than silently discarded.
    """
    u = _basis_change_matrix(sup.n)
    raw = u @ sup.matrix @ u.conj().T
    return PauliTransferMatrix(n=sup.n, matrix=_cast_real(raw, "PTM from Liouville"))


def target_ptm(unitary: np.ndarray) -> PauliTransferMatrix:
    """PTM of the channel ``rho -> U rho U^dagger`` for a unitary ``U``.

    The result is a real orthogonal matrix whose first row and column are
    ``e_1``.
    """
    unitary = np.asarray(unitary, dtype=complex)
    n = _check_square_power_of_two(unitary)
    d = unitary.shape[0]
    if np.abs(unitary @ unitary.conj().T - np.eye(d)).max() > 1e-10:
        raise ValueError("target gate is not unitary to 1e-10")
    u = _basis_change_matrix(n)
    liouville = np.kron(unitary.conj(), unitary)
    raw = u @ liouville @ u.conj().T
    return PauliTransferMatrix(n=n, matrix=_cast_real(raw, "target PTM"))


def choi_from_ptm(ptm: PauliTransferMatrix | ErrorMatrix) -> ChoiMatrix:
    """Choi matrix ``C = (1/d) sum_ij R_ij (P_j^T kron P_i)``.

    Accepts error matrices as well: the map is linear, so differences of
    channels convert to the (Hermitian, traceless-output) difference of
    their Choi matrices.
    """
    paulis = _pauli_stack(ptm.n)
    d = 2**ptm.n
    # C[(a p), (c q)] = (1/d) sum_ij R_ij P_j[c, a] P_i[p, q]
    c4 = np.einsum("ij,jca,ipq->apcq", ptm.matrix, paulis, paulis) / d
    return ChoiMatrix(n=ptm.n, matrix=c4.reshape(d * d, d * d))


def ptm_from_choi(choi: ChoiMatrix) -> PauliTransferMatrix:
    """Recover the PTM entrywise as ``R_ij = (1/d) Tr[C (P_j^T kron P_i)]``."""
    paulis = _pauli_stack(choi.n)
    d = 2**choi.n
    c4 = choi.matrix.reshape(d, d, d, d)
    raw = np.einsum("apcq,jac,iqp->ij", c4, paulis, paulis) / d
    return PauliTransferMatrix(n=choi.n, matrix=_cast_real(raw, "PTM from Choi"))


def apply_channel(ptm: PauliTransferMatrix, state: DensityVector) -> DensityVector:
    """Act with a channel on a Pauli-convention density vector."""
    if state.convention is not Convention.PAULI:
        raise ValueError("apply_channel expects a Pauli-convention density vector")
    if state.coefficients.size != ptm.dim:
        raise ValueError(
            f"state has {state.coefficients.size} coefficients, channel expects {ptm.dim}"
        )
    return DensityVector(
        coefficients=ptm.matrix @ state.coefficients, convention=Convention.PAULI
    )


def channel_power(ptm: PauliTransferMatrix, passes: int) -> PauliTransferMatrix:
    """``passes``-fold repetition of a channel; ``passes = 0`` is the identity."""
    if passes < 0:
        raise ValueError(f"pass count must be >= 0, got {passes}")
    return PauliTransferMatrix(n=ptm.n, matrix=np.linalg.matrix_power(ptm.matrix, passes))


def partial_trace_output(choi_matrix: np.ndarray, d: int) -> np.ndarray:
    """Trace out the output (second) tensor factor of a ``d^2 x d^2`` matrix."""
    return np.einsum("apcp->ac", choi_matrix.reshape(d, d, d, d))


def is_cptp(choi: ChoiMatrix, tol: float) -> CPTPReport:
    """Check complete positivity and trace preservation of a Choi matrix.

    CP requires all eigenvalues ``>= -tol``; TP requires the output-side
    partial trace to equal the identity within ``tol`` (max-abs).
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    d = 2**choi.n
    herm = (choi.matrix + choi.matrix.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(herm).min())
    tp_residual = float(np.abs(partial_trace_output(choi.matrix, d) - np.eye(d)).max())
    return CPTPReport(
        ok=min_eig >= -tol and tp_residual <= tol,
        min_eigenvalue=min_eig,
        tp_residual=tp_residual,
    )


def target_order(target: PauliTransferMatrix, max_order: int = 16) -> int | None:
    """Smallest ``k <= max_order`` with ``T^k = I`` (to 1e-10), else ``None``.

    Valid pass counts for recovering a single pass of a gate with order
    ``k`` are ``N = mk + 1``.
    """
    dim = target.dim
    power = np.eye(dim)
    for k in range(1, max_order + 1):
        power = power @ target.matrix
        if np.abs(power - np.eye(dim)).max() <= 1e-10:
            return k
    return None


def valid_pass_count(target: PauliTransferMatrix, passes: int, max_order: int = 64) -> bool:
    """Whether ``passes = m * order + 1`` for the target's order."""
    order = target_order(target, max_order)
    if order is None:
        raise ValueError(f"target has no power returning to identity within {max_order}")
    return passes >= 1 and (passes - 1) % order == 0
