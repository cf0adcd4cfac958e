"""Simulated standard process tomography of a multipass gate.

The circuit set is the informationally complete product construction:
per-qubit preparations from ``{Z0, Z1, X+, Y+}`` and per-qubit measurement
bases from ``{X, Y, Z}``, i.e. 12 circuits for one qubit and 144 for two.
Between preparation and measurement the characterized channel is applied
``N`` times (the passes).

Imperfections follow a fixed gate-consumption model: preparing ``|+>`` or
``|+i>`` and rotating into the X or Y measurement basis each cost exactly
one noisy half-rotation gate, so those qubits get one SPAM error channel
on that side; Z-basis preparation and measurement cost none (phase gates
are treated as perfect).  The SPAM channels sit at the two ends of the
circuit, so their bias does not grow with the number of passes — the
effect the multipass method exploits.  Measured counts pass through
readout confusion and may be corrected by inverting it (readout
mitigation), leaving quasi-counts that are deliberately not clipped.

Reconstruction is linear least squares over the real Pauli-basis entries
of the transfer matrix, which parameterizes exactly the Hermitian Choi
matrices; no physicality projection is applied unless asked for.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from itertools import product
from typing import Mapping

import numpy as np

from .channels import (
    ChoiMatrix,
    PauliTransferMatrix,
    choi_from_ptm,
    ptm_from_choi,
)
from .exceptions import IncompleteCircuitSetError
from .noise import NoiseModel, spam_error_channel

PREPARATIONS = ("Z0", "Z1", "X+", "Y+")
MEASUREMENT_BASES = ("X", "Y", "Z")

# Pauli-convention vectors (1, x, y, z) of the preparation states, and of
# the +1/-1 projectors of each measurement basis pre-divided by 2 so that an
# outcome probability is exactly (effect row) . (state vector) after the
# per-qubit Kronecker product.
_PREP_VECTORS = {
    "Z0": np.array([1.0, 0.0, 0.0, 1.0]),
    "Z1": np.array([1.0, 0.0, 0.0, -1.0]),
    "X+": np.array([1.0, 1.0, 0.0, 0.0]),
    "Y+": np.array([1.0, 0.0, 1.0, 0.0]),
}
_EFFECT_VECTORS = {
    "X": (np.array([1.0, 1.0, 0.0, 0.0]) / 2, np.array([1.0, -1.0, 0.0, 0.0]) / 2),
    "Y": (np.array([1.0, 0.0, 1.0, 0.0]) / 2, np.array([1.0, 0.0, -1.0, 0.0]) / 2),
    "Z": (np.array([1.0, 0.0, 0.0, 1.0]) / 2, np.array([1.0, 0.0, 0.0, -1.0]) / 2),
}
_NOISY_PREPS = frozenset({"X+", "Y+"})
_NOISY_BASES = frozenset({"X", "Y"})


@dataclass(frozen=True)
class TomographyCircuit:
    """One prepare / apply-N-passes / measure experiment.

    ``prep`` and ``basis`` are indexed by qubit (entry 0 = qubit 0, the
    least significant bit of outcome labels).
    """

    prep: tuple[str, ...]
    basis: tuple[str, ...]
    passes: int

    def __post_init__(self) -> None:
        if len(self.prep) != len(self.basis):
            raise ValueError("prep and basis must list the same number of qubits")
        if any(p not in _PREP_VECTORS for p in self.prep):
            raise ValueError(f"unknown preparation in {self.prep}")
        if any(b not in _EFFECT_VECTORS for b in self.basis):
            raise ValueError(f"unknown measurement basis in {self.basis}")
        if self.passes < 1:
            raise ValueError("passes must be >= 1")

    @property
    def n(self) -> int:
        return len(self.prep)

    @property
    def label(self) -> str:
        return f"prep:{','.join(self.prep)}|meas:{','.join(self.basis)}|passes:{self.passes}"


@dataclass(frozen=True)
class ReconstructionResult:
    """Least-squares estimate of the multipass channel."""

    choi: ChoiMatrix
    ptm: PauliTransferMatrix
    residual: float


def generate_circuits(n: int, passes: int) -> list[TomographyCircuit]:
    """Full preparation x basis Cartesian product, preparation-major order."""
    if n < 1:
        raise ValueError("qubit count must be >= 1")
    return [
        TomographyCircuit(prep=prep, basis=basis, passes=passes)
        for prep in product(PREPARATIONS, repeat=n)
        for basis in product(MEASUREMENT_BASES, repeat=n)
    ]


def _kron_by_qubit(factors: list[np.ndarray]) -> np.ndarray:
    """Kronecker product with qubit 0 as the least significant factor."""
    out = factors[-1]
    for factor in reversed(factors[:-1]):
        out = np.kron(out, factor)
    return out


@functools.lru_cache(maxsize=None)
def _effect_matrix(basis: tuple[str, ...]) -> np.ndarray:
    """Rows are the Pauli vectors of the 2^n outcome effects of a basis choice."""
    n = len(basis)
    rows = []
    for outcome in range(2**n):
        vecs = [_EFFECT_VECTORS[basis[q]][(outcome >> q) & 1] for q in range(n)]
        rows.append(_kron_by_qubit(vecs))
    return np.array(rows)


def _prep_vector(prep: tuple[str, ...]) -> np.ndarray:
    return _kron_by_qubit([_PREP_VECTORS[p] for p in prep])


def _spam_sandwich(labels: tuple[str, ...], noisy: frozenset, spam: np.ndarray) -> np.ndarray:
    return _kron_by_qubit([spam if lab in noisy else np.eye(4) for lab in labels])


def exact_probabilities(
    circuit: TomographyCircuit, channel: PauliTransferMatrix, noise: NoiseModel
) -> np.ndarray:
    """Outcome distribution of one circuit under SPAM and readout noise.

    Composes preparation, per-noisy-gate SPAM channels, ``N`` passes of the
    channel, measurement-side SPAM channels, ideal projective effects, and
    the readout confusion.  The result sums to one.
    """
    if circuit.n != channel.n:
        raise ValueError(f"circuit is on {circuit.n} qubits, channel on {channel.n}")
    spam = spam_error_channel(noise.spam_infidelity).matrix
    state = _prep_vector(circuit.prep)
    state = _spam_sandwich(circuit.prep, _NOISY_PREPS, spam) @ state
    state = np.linalg.matrix_power(channel.matrix, circuit.passes) @ state
    state = _spam_sandwich(circuit.basis, _NOISY_BASES, spam) @ state
    ideal = _effect_matrix(circuit.basis) @ state
    probabilities = noise.readout_confusion @ ideal
    total = probabilities.sum()
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"probabilities sum to {total}, expected 1; non-TP input?")
    return probabilities


def sample_counts(probabilities: np.ndarray, shots: int, seed) -> np.ndarray:
    """One multinomial draw of ``shots`` outcomes; deterministic in seed."""
    probabilities = np.asarray(probabilities, dtype=float)
    if abs(probabilities.sum() - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")
    clipped = np.clip(probabilities, 0.0, None)
    rng = np.random.default_rng(seed)
    return rng.multinomial(shots, clipped / clipped.sum())


def mitigate_readout(counts: Mapping, confusion: np.ndarray) -> dict:
    """Apply the inverse confusion matrix to every count vector.

    The corrected vectors are quasi-counts: mildly negative entries are
    kept, since clipping would bias the least-squares estimate downstream.
    """
    confusion = np.asarray(confusion, dtype=float)
    try:
        inverse = np.linalg.inv(confusion)
    except np.linalg.LinAlgError as exc:
        raise ValueError("confusion matrix is singular; cannot mitigate") from exc
    return {circuit: inverse @ np.asarray(vec, dtype=float) for circuit, vec in counts.items()}


def reconstruct(
    counts: Mapping, n: int | None = None, project_psd: bool = False
) -> ReconstructionResult:
    """Linear least-squares channel reconstruction from (quasi-)counts.

    One linear equation per (circuit, outcome), unknowns the real Pauli
    transfer matrix entries (equivalently the Hermitian Choi matrix, so
    Hermiticity is exact by construction).  Counts are normalized per
    circuit; exact probabilities may be passed directly.  With
    ``project_psd`` the Choi estimate has its negative eigenvalues clipped
    before the transfer matrix is recomputed.
    """
    circuits = list(counts.keys())
    if not circuits:
        raise IncompleteCircuitSetError("no circuits supplied")
    if n is None:
        n = circuits[0].n
    dim = 4**n
    rows = []
    values = []
    for circuit in circuits:
        if circuit.n != n:
            raise ValueError("mixed qubit counts in counts table")
        frequencies = np.asarray(counts[circuit], dtype=float)
        frequencies = frequencies / frequencies.sum()
        prep = _prep_vector(circuit.prep)
        effect_rows = _effect_matrix(circuit.basis)
        for outcome in range(2**n):
            rows.append(np.outer(effect_rows[outcome], prep).ravel())
            values.append(frequencies[outcome])
    design = np.array(rows)
    target = np.array(values)
    solution, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < dim * dim:
        raise IncompleteCircuitSetError(
            f"design matrix rank {rank} < {dim * dim}; circuit set is incomplete"
        )
    residual = float(np.linalg.norm(design @ solution - target))
    ptm = PauliTransferMatrix(n=n, matrix=solution.reshape(dim, dim))
    choi = choi_from_ptm(ptm)
    if project_psd:
        eigvals, eigvecs = np.linalg.eigh(choi.matrix)
        clipped = (eigvecs * np.clip(eigvals, 0, None)) @ eigvecs.conj().T
        choi = ChoiMatrix(n=n, matrix=clipped)
        ptm = ptm_from_choi(choi)
    return ReconstructionResult(choi=choi, ptm=ptm, residual=residual)


def run_tomography(
    channel: PauliTransferMatrix,
    passes: int,
    noise: NoiseModel,
    project_psd: bool = False,
) -> ReconstructionResult:
    """Stage I end to end: simulate all circuits and reconstruct ``R^N``.

    With ``noise.shots = None`` the exact outcome probabilities are used
    (infinite statistics); otherwise each circuit gets one multinomial
    draw with a per-circuit seed derived as ``(noise.seed, index)``.
    Readout mitigation with the model's own confusion matrix is always
    applied.
    """
    circuits = generate_circuits(channel.n, passes)
    table = {}
    for index, circuit in enumerate(circuits):
        probabilities = exact_probabilities(circuit, channel, noise)
        if noise.shots is None:
            table[circuit] = probabilities
        else:
            table[circuit] = sample_counts(probabilities, noise.shots, [noise.seed, index])
    table = mitigate_readout(table, noise.readout_confusion)
    return reconstruct(table, n=channel.n, project_psd=project_psd)
