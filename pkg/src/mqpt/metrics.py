"""Process distance metrics: fidelity/infidelity, diamond norm, the
fidelity-diamond sandwich bound, and the differential diamond norm.

The process fidelity of a channel against a unitary target is
``F = Tr[T^dag R] / d^2`` with infidelity ``e_F = 1 - F``; the restriction
to unitary targets is what makes the equivalent error-matrix form
``e_F = -Tr[T^dag E] / d^2`` exact.  The diamond norm of an error matrix is
computed by converting it to Choi form and solving the semidefinite
program in :mod:`mqpt.diamond`.  For pairs of unitaries a closed form is
available and serves as an independent oracle: ``2 sqrt(1 - nu^2)`` where
``nu`` is the distance from the origin to the convex hull of the
eigenvalues of ``U^dag V``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .channels import ErrorMatrix, PauliTransferMatrix, choi_from_ptm
from .diamond import DiamondResult, diamond_norm_choi, diamond_norm_general_choi
from .exceptions import ConvergenceError


@dataclass(frozen=True)
class MetricReport:
    """Metrics of one channel against its target."""

    fidelity: float
    infidelity: float
    diamond_norm: float
    diamond_solver_gap: float
    differential_diamond: float | None = None


def _as_error_array(error: ErrorMatrix | PauliTransferMatrix | np.ndarray) -> tuple[int, np.ndarray]:
    if isinstance(error, (ErrorMatrix, PauliTransferMatrix)):
        return error.n, error.matrix
    error = np.asarray(error, dtype=float)
    dim = error.shape[0]
    n = (int(dim).bit_length() - 1) // 2
    if error.ndim != 2 or error.shape != (dim, dim) or 4**n != dim:
        raise ValueError(f"expected a 4^n x 4^n real matrix, got shape {error.shape}")
    return n, error


def process_fidelity(
    target: PauliTransferMatrix, channel: PauliTransferMatrix
) -> tuple[float, float]:
    """Fidelity and infidelity of a channel against a unitary-target PTM."""
    if target.n != channel.n:
        raise ValueError(f"dimension mismatch: target n={target.n}, channel n={channel.n}")
    dim = target.dim
    if np.abs(target.matrix @ target.matrix.T - np.eye(dim)).max() > 1e-8:
        raise ValueError("process fidelity requires a unitary (orthogonal-PTM) target")
    fidelity = float(np.trace(target.matrix.T @ channel.matrix)) / dim
    return fidelity, 1.0 - fidelity


def diamond_norm_result(
    error: ErrorMatrix | PauliTransferMatrix | np.ndarray,
    tol: float = 1e-6,
    max_iterations: int = 50000,
) -> DiamondResult:
    """Diamond norm with its certified solver gap; raises on non-convergence."""
    n, matrix = _as_error_array(error)
    choi = choi_from_ptm(ErrorMatrix(n=n, matrix=matrix))
    result = diamond_norm_choi(choi.matrix, tol=tol, max_iterations=max_iterations)
    if not result.converged:
        raise ConvergenceError(
            f"diamond-norm SDP gap {result.gap:.3e} > {tol:.1e} "
            f"after {result.iterations} iterations"
        )
    return result


def diamond_norm(
    error: ErrorMatrix | PauliTransferMatrix | np.ndarray,
    tol: float = 1e-6,
    max_iterations: int = 50000,
) -> float:
    """Diamond norm of a PTM-basis error matrix (difference of channels)."""
    return diamond_norm_result(error, tol=tol, max_iterations=max_iterations).value


def diamond_norm_from_choi(
    choi: np.ndarray,
    tol: float = 1e-6,
    max_iterations: int = 50000,
) -> float:
    """Diamond norm of the map specified directly by a Choi matrix.

    Accepts arbitrary (also non-Hermitian) Choi input via the general
    two-density semidefinite program.  Note that several off-the-shelf
    channel toolkits interpret a bare array argument exactly this way, so
    feeding a transfer matrix here quantifies the matrix as a state-like
    object rather than the channel difference it represents; see
    :func:`diamond_norm` for the channel-difference norm.
    """
    choi = np.asarray(choi, dtype=complex)
    if np.abs(choi - choi.conj().T).max() <= 1e-12:
        result = diamond_norm_choi(choi, tol=tol, max_iterations=max_iterations)
    else:
        result = diamond_norm_general_choi(choi, tol=tol, max_iterations=max_iterations)
    if not result.converged:
        raise ConvergenceError(
            f"diamond-norm SDP gap {result.gap:.3e} > {tol:.1e} "
            f"after {result.iterations} iterations"
        )
    return result.value


def differential_diamond(
    error_measured: ErrorMatrix,
    error_actual: ErrorMatrix,
    tol: float = 1e-6,
) -> float:
    """Diamond norm of the difference between a recovered and the true error."""
    if error_measured.n != error_actual.n:
        raise ValueError("error matrices act on different qubit counts")
    difference = error_measured.matrix - error_actual.matrix
    return diamond_norm(ErrorMatrix(n=error_measured.n, matrix=difference), tol=tol)


def _hull_distance(points: np.ndarray) -> float:
    """Distance from the origin to the convex hull of points in the plane.

    The maximizing separating direction is either aligned with a single
    point or normal to a segment between two points, so scanning that
    finite candidate set is exact.
    """
    pts = np.column_stack([points.real, points.imag])
    candidates = [p / np.linalg.norm(p) for p in pts if np.linalg.norm(p) > 0]
    for a, b in combinations(pts, 2):
        edge = b - a
        norm = np.linalg.norm(edge)
        if norm > 0:
            candidates.append(np.array([-edge[1], edge[0]]) / norm)
            candidates.append(np.array([edge[1], -edge[0]]) / norm)
    best = 0.0
    for direction in candidates:
        margin = min(float(p @ direction) for p in pts)
        best = max(best, margin)
    return best


def unitary_diamond_oracle(u: np.ndarray, v: np.ndarray) -> float:
    """Closed-form diamond distance between two unitary channels."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected two unitaries of equal square shape")
    d = u.shape[0]
    for name, mat in (("first", u), ("second", v)):
        if np.abs(mat @ mat.conj().T - np.eye(d)).max() > 1e-10:
            raise ValueError(f"{name} argument is not unitary to 1e-10")
    eigenvalues = np.linalg.eigvals(u.conj().T @ v)
    nu = min(1.0, _hull_distance(eigenvalues))
    return 2.0 * np.sqrt(max(0.0, 1.0 - nu * nu))


def diamond_bound_check(
    infidelity: float, diamond: float, d: int, slack: float = 1e-6
) -> bool:
    """Whether ``e_F <= ||E||_diamond <= d sqrt(e_F)`` holds within slack."""
    if not 0 <= infidelity <= 1:
        raise ValueError(f"infidelity must be in [0, 1], got {infidelity}")
    return (
        infidelity <= diamond + slack and diamond <= d * np.sqrt(infidelity) + slack
    )


def metric_report(
    target: PauliTransferMatrix,
    channel: PauliTransferMatrix,
    error_actual: ErrorMatrix | None = None,
    tol: float = 1e-6,
) -> MetricReport:
    """Full metric set for a measured channel against its target."""
    fidelity, infidelity = process_fidelity(target, channel)
    error = ErrorMatrix(n=target.n, matrix=channel.matrix - target.matrix)
    dn = diamond_norm_result(error, tol=tol)
    diff = None
    if error_actual is not None:
        diff = differential_diamond(error, error_actual, tol=tol)
    return MetricReport(
        fidelity=fidelity,
        infidelity=infidelity,
        diamond_norm=dn.value,
        diamond_solver_gap=dn.gap,
        differential_diamond=diff,
    )
