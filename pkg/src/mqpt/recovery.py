"""Single-pass error recovery from a measured multipass transfer matrix.

Three methods solve ``(T + E)^N = R_N`` for the error matrix ``E`` given
the target ``T``, the measured N-pass transfer matrix ``R_N``, and the
pass count ``N``:

* the iterative method -- fixed-point refinement
  ``E <- E + alpha ((R_N) - (T + E)^N)``, practically exact on its input
  for high-fidelity gates;
* the involutary linear method -- for targets with ``T^2 = I`` and
  ``N = 2m + 1``, truncating at first order turns the problem into the
  Sylvester equation ``(m+1) T E + m E T = T R_N - I``, solved exactly
  through its Kronecker form (the quadratic remainder grows as ``m^2``);
* the extended linear method -- for any invertible target, the first-order
  relation ``sum_s T^{-s} E T^s = T^{1-N} R_N - T`` solved by gradient
  iterations with a small convergence factor.

Pass counts must satisfy ``N = m k + 1`` for the target's order ``k`` (the
smallest power returning to the identity): 2m+1 for self-inverse gates,
4m+1 for quarter-turn gates.  This is enforced, not assumed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import ErrorMatrix, PauliTransferMatrix, target_order


@dataclass(frozen=True)
class IterativeConfig:
    """Fixed-point refinement settings (library defaults are the published ones)."""

    alpha: float = 0.01
    tolerance: float = 1e-12
    max_iterations: int = 3000

    def __post_init__(self) -> None:
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class ExtendedSylvesterConfig:
    """Extended-Sylvester iteration settings.

    ``mu`` trades iteration count against stability: larger values
    converge in fewer steps but diverge above a critical value.
    """

    mu: float = 0.003
    tolerance: float = 1e-12
    max_iterations: int = 20000
    initial_error: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not 0 < self.mu < 1:
            raise ValueError(f"mu must be in (0, 1), got {self.mu}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class RecoveryResult:
    """Recovered error matrix with convergence diagnostics.

    ``residual`` is the Frobenius norm of the defining equation's mismatch
    for the returned iterate; ``diverged`` marks an extended-Sylvester run
    stopped because the residual grew tenfold from its running minimum
    (retry with a smaller ``mu``).
    """

    error: ErrorMatrix
    iterations: int
    residual: float
    converged: bool
    diverged: bool = field(default=False)


def _check_pass_count(target: PauliTransferMatrix, passes: int) -> int:
    order = target_order(target, max_order=64)
    if order is None:
        raise ValueError("target has no finite order <= 64; pass validity is undefined")
    if passes < 1 or (passes - 1) % order != 0:
        raise ValueError(
            f"invalid pass count {passes}: the target has order {order}, "
            f"so recovery needs N = {order}m + 1"
        )
    return order


def iterative_recover(
    target: PauliTransferMatrix,
    multipass: PauliTransferMatrix,
    passes: int,
    config: IterativeConfig | None = None,
) -> RecoveryResult:
    """Fixed-point recovery of ``E`` from ``(T + E)^N = R_N``.

    Starts from ``E = 0`` and nudges by ``alpha`` times the current
    multipass mismatch until its Frobenius norm drops below the tolerance.
    Non-convergence returns the final iterate flagged, not an exception.
    """
    if config is None:
        config = IterativeConfig()
    _check_pass_count(target, passes)
    t = target.matrix
    rn = multipass.matrix
    error = np.zeros_like(t)
    iterations = 0
    residual = float(np.linalg.norm(rn - np.linalg.matrix_power(t, passes)))
    while residual >= config.tolerance and iterations < config.max_iterations:
        delta = rn - np.linalg.matrix_power(t + error, passes)
        residual = float(np.linalg.norm(delta))
        if residual < config.tolerance:
            break
        error = error + config.alpha * delta
        iterations += 1
    residual = float(np.linalg.norm(rn - np.linalg.matrix_power(t + error, passes)))
    return RecoveryResult(
        error=ErrorMatrix(n=target.n, matrix=error),
        iterations=iterations,
        residual=residual,
        converged=residual < config.tolerance,
    )


def solve_sylvester_kron(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Solve ``A X + X B = C`` by dense LU on the Kronecker-form system.

    The row-major vectorization turns the equation into
    ``(A kron I + I kron B^T) vec(X) = vec(C)``; at the sizes used here
    (a 256 x 256 system for two qubits) this is immediate.
    """
    dim = a.shape[0]
    eye = np.eye(dim)
    system = np.kron(a, eye) + np.kron(eye, b.T)
    return np.linalg.solve(system, c.ravel()).reshape(dim, dim)


def sylvester_recover_involutary(
    target: PauliTransferMatrix,
    multipass: PauliTransferMatrix,
    m: int,
) -> ErrorMatrix:
    """Linear-method recovery for self-inverse targets with ``N = 2m + 1``.

    Solves ``(m+1) T E + m E T = T R_N - I`` exactly; the solution is
    unique because ``(m+1) T`` and ``-m T`` share no eigenvalue.  The
    leading deviation from the true error is quadratic in its size.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    t = target.matrix
    dim = t.shape[0]
    if np.abs(t @ t - np.eye(dim)).max() > 1e-10:
        raise ValueError("linear method requires a self-inverse target (T^2 = I)")
    a = (m + 1) * t
    b = m * t
    c = t @ multipass.matrix - np.eye(dim)
    return ErrorMatrix(n=target.n, matrix=solve_sylvester_kron(a, b, c))


def extended_sylvester_recover(
    target: PauliTransferMatrix,
    multipass: PauliTransferMatrix,
    passes: int,
    config: ExtendedSylvesterConfig | None = None,
) -> RecoveryResult:
    """Linear-method recovery for arbitrary (invertible) targets.

    Iterates
    ``E_{k+1} = E_k + mu sum_q T^q (E_N - sum_s T^{-s} E_k T^s) T^{-q}``
    with ``E_N = T^{1-N} R_N - T`` until the first-order relation's
    residual meets the tolerance.  Divergence (residual growing 10x above
    its running minimum) stops the run and returns the best iterate.
    """
    if config is None:
        config = ExtendedSylvesterConfig()
    _check_pass_count(target, passes)
    t = target.matrix
    dim = t.shape[0]
    t_inv = np.linalg.inv(t)
    powers = [np.eye(dim)]
    inverse_powers = [np.eye(dim)]
    for _ in range(passes - 1):
        powers.append(powers[-1] @ t)
        inverse_powers.append(inverse_powers[-1] @ t_inv)
    known = inverse_powers[-1] @ multipass.matrix - t

    if config.initial_error is not None:
        error = np.array(config.initial_error, dtype=float)
        if error.shape != t.shape:
            raise ValueError("initial error matrix has wrong shape")
    else:
        error = np.zeros_like(t)

    def conjugation_sum(matrix: np.ndarray, forward_first: bool) -> np.ndarray:
        total = np.zeros_like(matrix)
        for s in range(passes):
            if forward_first:
                total += inverse_powers[s] @ matrix @ powers[s]
            else:
                total += powers[s] @ matrix @ inverse_powers[s]
        return total

    best_error = error
    best_residual = np.inf
    iterations = 0
    diverged = False
    while iterations < config.max_iterations:
        mismatch = known - conjugation_sum(error, True)
        residual = float(np.linalg.norm(mismatch))
        if residual < best_residual:
            best_residual = residual
            best_error = error
        elif residual > 10 * best_residual:
            diverged = True
            break
        if residual < config.tolerance:
            break
        error = error + config.mu * conjugation_sum(mismatch, False)
        iterations += 1
    else:
        # Budget exhausted right after an update; score the final iterate.
        residual = float(np.linalg.norm(known - conjugation_sum(error, True)))
        if residual < best_residual:
            best_residual = residual
            best_error = error
    return RecoveryResult(
        error=ErrorMatrix(n=target.n, matrix=best_error),
        iterations=iterations,
        residual=float(best_residual),
        converged=best_residual < config.tolerance,
        diverged=diverged,
    )


def second_order_terms(
    target: PauliTransferMatrix, error: ErrorMatrix
) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic terms of the self-inverse multipass expansion.

    Returns ``(T E^2 + E T E + E^2 T, T E T E T)``, the two matrices whose
    ``m``-dependent combination is the second-order remainder the linear
    method drops.
    """
    t = target.matrix
    dim = t.shape[0]
    if np.abs(t @ t - np.eye(dim)).max() > 1e-10:
        raise ValueError("expansion requires a self-inverse target (T^2 = I)")
    e = error.matrix
    ea = t @ e @ e + e @ t @ e + e @ e @ t
    eb = t @ e @ t @ e @ t
    return ea, eb


def involutary_multipass_expansion(
    target: PauliTransferMatrix, error: ErrorMatrix, m: int
) -> np.ndarray:
    """Second-order approximation of ``(T + E)^{2m+1}`` for ``T^2 = I``:

    ``T + (m+1) E + m T E T + m(m+1)/2 Ea + m(m-1)/2 Eb``
    with ``(Ea, Eb)`` from :func:`second_order_terms`; the neglected
    remainder is third order in ``E``.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    t = target.matrix
    e = error.matrix
    ea, eb = second_order_terms(target, error)
    return (
        t
        + (m + 1) * e
        + m * (t @ e @ t)
        + (m * (m + 1) / 2) * ea
        + (m * (m - 1) / 2) * eb
    )
