"""Gate-error generation, SPAM/readout imperfection models, and bundled
target/error fixtures.

Gate errors are produced by exponentiating a random Lindblad generator
(random Hermitian drift plus random Pauli collapse operators) and composing
the resulting channel with the target, so the total channel is CPTP by
construction.  The SPAM channel is a fixed-shape near-identity single-qubit
channel, half depolarizing and half coherent X rotation in its infidelity
budget.  Readout error is a symmetric per-qubit confusion matrix whose
column j holds the distribution of recorded outcomes given true outcome j.
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.linalg import expm

from .channels import ErrorMatrix, PauliTransferMatrix, liouville_from_ptm, ptm_from_liouville
from .channels import LiouvilleSuperoperator
from .pauli import _pauli_stack
from .serialize import channel_from_dict

_MAX_SPAM_INFIDELITY = 0.1


@dataclass(frozen=True)
class NoiseModel:
    """Stage-I imperfection description for simulated tomography.

    ``shots = None`` means infinite statistics: exact outcome probabilities
    are used instead of multinomial sampling.
    """

    spam_infidelity: float
    readout_confusion: np.ndarray
    shots: int | None
    seed: int

    def __post_init__(self) -> None:
        confusion = np.asarray(self.readout_confusion, dtype=float)
        if confusion.ndim != 2 or confusion.shape[0] != confusion.shape[1]:
            raise ValueError("confusion matrix must be square")
        if confusion.min() < 0 or confusion.max() > 1:
            raise ValueError("confusion entries must lie in [0, 1]")
        if np.abs(confusion.sum(axis=0) - 1).max() > 1e-12:
            raise ValueError("confusion columns must sum to 1")
        if not 0 <= self.spam_infidelity <= _MAX_SPAM_INFIDELITY:
            raise ValueError(f"spam_infidelity must be in [0, {_MAX_SPAM_INFIDELITY}]")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1 (or None for exact probabilities)")
        object.__setattr__(self, "readout_confusion", confusion)

    @property
    def n(self) -> int:
        return int(self.readout_confusion.shape[0]).bit_length() - 1

    @classmethod
    def ideal(cls, n: int, shots: int | None = None, seed: int = 0) -> "NoiseModel":
        """No SPAM, no readout error; only shot noise if ``shots`` is set."""
        return cls(0.0, np.eye(2**n), shots, seed)

    @classmethod
    def typical(cls, n: int, shots: int | None, seed: int) -> "NoiseModel":
        """Representative superconducting-processor magnitudes: SPAM
        infidelity 2e-4 per noisy gate and 3e-3 residual readout error."""
        return cls(2e-4, readout_confusion(n, 3e-3), shots, seed)


@dataclass(frozen=True)
class FixtureSet:
    """Published target and error matrices used by the simulations.

    The square-root-of-X pair and the CNOT(1,0) pair drive the simulated
    benchmarks; the CNOT(0,1) target with the hardware-measured error matrix
    stands in for the processor characterized in the experiment.
    """

    sqrtx_target: PauliTransferMatrix
    sqrtx_error: ErrorMatrix
    cnot10_target: PauliTransferMatrix
    cnot10_error: ErrorMatrix
    cnot01_target: PauliTransferMatrix
    manila_error: ErrorMatrix

    def pair(self, gate: str) -> tuple[PauliTransferMatrix, ErrorMatrix]:
        """Ground-truth (target, error) pair for a named gate."""
        try:
            return {
                "sqrtx": (self.sqrtx_target, self.sqrtx_error),
                "cnot10": (self.cnot10_target, self.cnot10_error),
                "cnot01": (self.cnot01_target, self.manila_error),
            }[gate]
        except KeyError:
            raise ValueError(f"unknown fixture gate {gate!r}") from None


def load_fixtures() -> FixtureSet:
    """Load the bundled fixture matrices (error tables at physical scale)."""
    import json

    loaded = {}
    for name in (
        "sqrtx_target",
        "sqrtx_error",
        "cnot10_target",
        "cnot10_error",
        "cnot01_target",
        "manila_error",
    ):
        text = resources.files("mqpt.data").joinpath(f"{name}.json").read_text()
        loaded[name] = channel_from_dict(json.loads(text))
    return FixtureSet(**loaded)


def readout_confusion(n: int, flip_probability: float) -> np.ndarray:
    """Tensor power of the symmetric single-qubit confusion matrix."""
    if not 0 <= flip_probability <= 0.5:
        raise ValueError(f"flip probability must be in [0, 0.5], got {flip_probability}")
    p = flip_probability
    single = np.array([[1 - p, p], [p, 1 - p]])
    confusion = single
    for _ in range(n - 1):
        confusion = np.kron(confusion, single)
    return confusion


def spam_error_channel(infidelity: float) -> PauliTransferMatrix:
    """Near-identity single-qubit channel with the given process infidelity.

    Half of the infidelity budget is a depolarizing channel and half a
    coherent X rotation; the depolarizing rate and rotation angle are solved
    so the composite infidelity equals the argument exactly.
    """
    if not 0 <= infidelity <= _MAX_SPAM_INFIDELITY:
        raise ValueError(f"infidelity must be in [0, {_MAX_SPAM_INFIDELITY}], got {infidelity}")
    p = 2 * infidelity / 3
    cos_theta = ((3 - 4 * infidelity) / (1 - p) - 1) / 2
    cos_theta = min(1.0, cos_theta)
    sin_theta = np.sqrt(max(0.0, 1 - cos_theta**2))
    depolarizing = np.diag([1.0, 1 - p, 1 - p, 1 - p])
    rotation = np.array(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, cos_theta, -sin_theta],
            [0, 0, sin_theta, cos_theta],
        ]
    )
    return PauliTransferMatrix(n=1, matrix=depolarizing @ rotation)


def _lindblad_generator(hamiltonian: np.ndarray, collapse: list[tuple[float, np.ndarray]]) -> np.ndarray:
    """Column-stacking Liouville generator for dH drift plus dissipators."""
    d = hamiltonian.shape[0]
    eye = np.eye(d)
    gen = -1j * (np.kron(eye, hamiltonian) - np.kron(hamiltonian.T, eye))
    for rate, op in collapse:
        anticomm = op.conj().T @ op
        gen += rate * (
            np.kron(op.conj(), op)
            - 0.5 * (np.kron(eye, anticomm) + np.kron(anticomm.T, eye))
        )
    return gen


def random_lindblad_error(
    target: PauliTransferMatrix,
    hamiltonian_strength: float,
    dissipation_strength: float,
    seed: int,
) -> tuple[ErrorMatrix, PauliTransferMatrix]:
    """Random near-identity CPTP error composed onto a target channel.

    Draws a random Hermitian drift of spectral norm ``hamiltonian_strength``
    and a random rate in ``[0, dissipation_strength]`` for every
    non-identity Pauli collapse operator, exponentiates the Lindblad
    generator, and composes it after the target.  Returns the error matrix
    and the total (CPTP) channel; deterministic in ``seed``.
    """
    if hamiltonian_strength < 0 or dissipation_strength < 0:
        raise ValueError("noise strengths must be >= 0")
    rng = np.random.default_rng(seed)
    n = target.n
    d = 2**n
    raw = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    hamiltonian = (raw + raw.conj().T) / 2
    norm = np.linalg.norm(hamiltonian, 2)
    if norm > 0:
        hamiltonian *= hamiltonian_strength / norm
    paulis = _pauli_stack(n)
    rates = dissipation_strength * rng.uniform(size=d * d - 1)
    collapse = [(rate, paulis[k + 1]) for k, rate in enumerate(rates)]
    error_channel = expm(_lindblad_generator(hamiltonian, collapse))
    total_liouville = error_channel @ liouville_from_ptm(target).matrix
    total = ptm_from_liouville(LiouvilleSuperoperator(n=n, matrix=total_liouville))
    return ErrorMatrix(n=n, matrix=total.matrix - target.matrix), total


def lindblad_error_with_infidelity(
    target: PauliTransferMatrix,
    infidelity: float,
    seed: int,
    hamiltonian_fraction: float = 0.5,
) -> tuple[ErrorMatrix, PauliTransferMatrix]:
    """Calibrate :func:`random_lindblad_error` to a requested process infidelity.

    Bisects a global scale on the two strengths (split by
    ``hamiltonian_fraction``) until the process infidelity of the generated
    channel matches ``infidelity`` to a relative 1e-6.
    """
    if infidelity < 0:
        raise ValueError("infidelity must be >= 0")
    if infidelity == 0:
        return random_lindblad_error(target, 0.0, 0.0, seed)
    d2 = float(4**target.n)

    def generated_infidelity(scale: float) -> tuple[float, tuple]:
        result = random_lindblad_error(
            target, hamiltonian_fraction * scale, (1 - hamiltonian_fraction) * scale, seed
        )
        error, _ = result
        return -np.sum(target.matrix * error.matrix) / d2, result

    hi = 1e-4
    value, result = generated_infidelity(hi)
    while value < infidelity:
        hi *= 2
        value, result = generated_infidelity(hi)
        if hi > 1e3:
            raise RuntimeError("infidelity calibration failed to bracket the target")
    lo = 0.0
    for _ in range(80):
        mid = (lo + hi) / 2
        value, result = generated_infidelity(mid)
        if abs(value - infidelity) <= 1e-6 * infidelity:
            break
        if value < infidelity:
            lo = mid
        else:
            hi = mid
    return result
