"""Batch experiment runner: tomography grids, recovery, metric
aggregation, and machine-readable output.

A run sweeps a (passes, shots) grid with a fixed number of seeded
repetitions per point; every repetition simulates a full tomography of the
ground-truth channel, recovers the single-pass error matrix with each
requested method, and scores it (infidelity, diamond norm, differential
diamond norm against the known error).  Per-repetition seeds derive from
the grid-point values, so results do not depend on execution order.

Gates are the bundled fixture pairs (the hardware-measured error table
plays the part of the processor for the ``cnot01`` gate) or a custom
target file combined with a seeded random error.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .channels import (
    ErrorMatrix,
    LiouvilleSuperoperator,
    PauliTransferMatrix,
    target_order,
    valid_pass_count,
)
from .exceptions import ConfigError
from .metrics import diamond_norm, differential_diamond, process_fidelity
from .noise import NoiseModel, load_fixtures, random_lindblad_error, readout_confusion
from .recovery import (
    ExtendedSylvesterConfig,
    IterativeConfig,
    extended_sylvester_recover,
    iterative_recover,
    sylvester_recover_involutary,
)
from .serialize import load_channel
from .tomography import run_tomography

FIXTURE_GATES = ("sqrtx", "cnot10", "cnot01")
METHODS = ("iterative", "sylvester", "extended_sylvester")


@dataclass(frozen=True)
class ExperimentConfig:
    """Batch run description; mirrors the flat configuration-file keys."""

    gate: str = "sqrtx"
    error_source: str = "fixture"
    passes: tuple[int, ...] = (1, 5, 17)
    shots: tuple[int | None, ...] = (10_000,)  # None = exact probabilities
    repetitions: int = 50
    methods: tuple[str, ...] = ("iterative",)
    spam_infidelity: float = 2e-4
    readout_error: float = 3e-3
    seed: int = 0
    output_dir: str = "results"
    random_seed: int = 0
    random_hamiltonian_strength: float = 0.01
    random_dissipation_strength: float = 1e-4
    diamond_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not self.passes or any(p < 1 for p in self.passes):
            raise ConfigError("passes must be a nonempty list of integers >= 1")
        if not self.shots or any(s is not None and s < 1 for s in self.shots):
            raise ConfigError("shots entries must be integers >= 1 (or 'exact')")
        unknown = set(self.methods) - set(METHODS)
        if not self.methods or unknown:
            raise ConfigError(f"methods must be a nonempty subset of {METHODS}, got {self.methods}")
        if self.error_source not in ("fixture", "random"):
            raise ConfigError(f"error_source must be 'fixture' or 'random', got {self.error_source!r}")


_LIST_KEYS = {"passes", "shots", "methods"}
_INT_KEYS = {"repetitions", "seed", "random_seed"}
_FLOAT_KEYS = {
    "spam_infidelity",
    "readout_error",
    "random_hamiltonian_strength",
    "random_dissipation_strength",
    "diamond_tol",
}


def parse_config_file(path: str | Path) -> dict:
    """Parse the flat ``key = value`` configuration format.

    Lists are comma separated; ``#`` starts a comment.
    """
    values: dict = {}
    valid = set(ExperimentConfig.__dataclass_fields__)
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in valid:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            if key in _LIST_KEYS:
                items = [item.strip() for item in value.split(",") if item.strip()]
                values[key] = tuple(items) if key == "methods" else tuple(int(i) for i in items)
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Build a config from a file with keyword overrides (CLI flags win)."""
    values = parse_config_file(path)
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


@dataclass(frozen=True)
class BetaFit:
    """Method-of-moments beta fit on rescaled samples."""

    a: float
    b: float
    scale: float


def fit_beta(samples: Sequence[float]) -> BetaFit:
    """Fit a beta distribution to positive samples by matching moments.

    Samples are rescaled by 1.05x their maximum so they sit inside the
    open unit interval; the fitted mean ``a / (a + b) * scale`` then equals
    the sample mean identically.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < 4:
        raise ValueError(f"need at least 4 samples, got {samples.size}")
    if samples.min() <= 0:
        raise ValueError("samples must be positive")
    scale = 1.05 * float(samples.max())
    rescaled = samples / scale
    mean = float(rescaled.mean())
    variance = float(rescaled.var())
    if variance <= 1e-16 * mean * mean:
        raise ValueError("degenerate (zero-variance) samples; no beta fit")
    common = mean * (1 - mean) / variance - 1
    return BetaFit(a=mean * common, b=(1 - mean) * common, scale=scale)


@dataclass
class TomographyRecord:
    """All repetitions of one (gate, method, passes, shots) grid point."""

    gate: str
    method: str
    passes: int
    shots: int
    seed: int
    errors: list[np.ndarray]
    diamond_norms: list[float]
    differential_diamonds: list[float]
    infidelities: list[float]
    mean_error: np.ndarray = field(init=False)
    beta_fits: dict[str, BetaFit | None] = field(init=False)

    def __post_init__(self) -> None:
        self.mean_error = np.mean(np.stack(self.errors), axis=0)
        fits: dict[str, BetaFit | None] = {}
        for name, samples in (
            ("diamond_norm", self.diamond_norms),
            ("differential_diamond", self.differential_diamonds),
            ("infidelity", self.infidelities),
        ):
            try:
                fits[name] = fit_beta(samples)
            except ValueError:
                fits[name] = None
        self.beta_fits = fits

    @property
    def repetitions(self) -> int:
        return len(self.errors)


def derived_seed(base: int, *key: int) -> int:
    """Stable per-grid-point seed; depends on values, not iteration order."""
    return int(np.random.SeedSequence([base, *key]).generate_state(1, dtype=np.uint64)[0])


def ground_truth(config: ExperimentConfig) -> tuple[PauliTransferMatrix, ErrorMatrix]:
    """Resolve the (target, error) pair the simulation treats as reality."""
    if config.gate in FIXTURE_GATES:
        target, fixture_error = load_fixtures().pair(config.gate)
    else:
        try:
            target = load_channel(config.gate)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load target channel {config.gate!r}: {exc}") from exc
        if not isinstance(target, PauliTransferMatrix):
            raise ConfigError("custom gate file must hold a 'ptm' channel")
        fixture_error = None
    if config.error_source == "fixture":
        if fixture_error is None:
            raise ConfigError("custom gate files have no fixture error; use error_source = random")
        return target, fixture_error
    error, _ = random_lindblad_error(
        target,
        config.random_hamiltonian_strength,
        config.random_dissipation_strength,
        config.random_seed,
    )
    return target, error


def _recover(method: str, target, multipass, passes: int) -> ErrorMatrix:
    if method == "iterative":
        return iterative_recover(target, multipass, passes, IterativeConfig()).error
    if method == "sylvester":
        return sylvester_recover_involutary(target, multipass, (passes - 1) // 2)
    if method == "extended_sylvester":
        return extended_sylvester_recover(
            target, multipass, passes, ExtendedSylvesterConfig()
        ).error
    raise ConfigError(f"unknown method {method!r}")


def run_batch(config: ExperimentConfig) -> list[TomographyRecord]:
    """Execute the full grid; deterministic in the config (seed included)."""
    target, true_error = ground_truth(config)
    n = target.n
    total = PauliTransferMatrix(n=n, matrix=target.matrix + true_error.matrix)
    for passes in config.passes:
        if not valid_pass_count(target, passes):
            order = target_order(target, 64)
            raise ConfigError(
                f"passes {passes} is invalid for this gate (order {order}); need N = {order}m + 1"
            )
    if "sylvester" in config.methods and target_order(target, 64) != 2:
        raise ConfigError("the 'sylvester' method requires a self-inverse gate")

    confusion = readout_confusion(n, config.readout_error)
    records: list[TomographyRecord] = []
    for passes in config.passes:
        for shots in config.shots:
            samples: dict[str, dict[str, list]] = {
                method: {"errors": [], "diamond": [], "diff": [], "infid": []}
                for method in config.methods
            }
            for rep in range(config.repetitions):
                rep_seed = derived_seed(config.seed, passes, shots, rep)
                noise = NoiseModel(config.spam_infidelity, confusion, shots, rep_seed)
                stage1 = run_tomography(total, passes, noise)
                for method in config.methods:
                    recovered = _recover(method, target, stage1.ptm, passes)
                    measured = PauliTransferMatrix(
                        n=n, matrix=target.matrix + recovered.matrix
                    )
                    _, infid = process_fidelity(target, measured)
                    bucket = samples[method]
                    bucket["errors"].append(recovered.matrix)
                    bucket["diamond"].append(diamond_norm(recovered, tol=config.diamond_tol))
                    bucket["diff"].append(
                        differential_diamond(recovered, true_error, tol=config.diamond_tol)
                    )
                    bucket["infid"].append(infid)
            for method in config.methods:
                bucket = samples[method]
                records.append(
                    TomographyRecord(
                        gate=config.gate,
                        method=method,
                        passes=passes,
                        shots=shots,
                        seed=config.seed,
                        errors=bucket["errors"],
                        diamond_norms=bucket["diamond"],
                        differential_diamonds=bucket["diff"],
                        infidelities=bucket["infid"],
                    )
                )
    return records


def multipass_populations(
    superoperator: LiouvilleSuperoperator, applications: int
) -> tuple[float, float, float, float]:
    """Basis-state populations after applying a two-qubit channel M times.

    Raises the column-stacking superoperator to the M-th power, applies it
    to the vectorized ``|00><00|``, and reads off the four diagonal
    components (indices 0, 5, 10, 15 of the 16-vector).  For a CPTP input
    the values are real and sum to one up to roundoff.
    """
    if superoperator.dim != 16:
        raise ValueError("populations are defined for two-qubit superoperators")
    if applications < 0:
        raise ValueError("number of applications must be >= 0")
    initial = np.zeros(16, dtype=complex)
    initial[0] = 1.0
    final = np.linalg.matrix_power(superoperator.matrix, applications) @ initial
    populations = final[[0, 5, 10, 15]]
    if np.abs(populations.imag).max() > 1e-9:
        raise ValueError("populations have imaginary parts above 1e-9; non-physical input?")
    p00, p01, p10, p11 = populations.real
    return float(p00), float(p01), float(p10), float(p11)


def _float_list(values) -> list[float]:
    return [float(v) for v in values]


def emit(
    records: Sequence[TomographyRecord],
    output_dir: str | Path,
    formats: Sequence[str] = ("csv", "json"),
) -> list[Path]:
    """Write the summary CSV and one JSON file per record.

    Floats are serialized by ``repr`` on both paths, so identical records
    produce byte-identical files and the JSON round trip is exact.
    """
    if not records:
        raise ValueError("no records to emit")
    unknown = set(formats) - {"csv", "json"}
    if unknown:
        raise ValueError(f"unknown output formats: {sorted(unknown)}")
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if "csv" in formats:
        path = output_dir / "summary.csv"
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                [
                    "gate",
                    "method",
                    "passes",
                    "shots",
                    "repetition",
                    "infidelity",
                    "diamond_norm",
                    "differential_diamond",
                ]
            )
            for record in records:
                for rep in range(record.repetitions):
                    writer.writerow(
                        [
                            record.gate,
                            record.method,
                            record.passes,
                            record.shots,
                            rep,
                            repr(record.infidelities[rep]),
                            repr(record.diamond_norms[rep]),
                            repr(record.differential_diamonds[rep]),
                        ]
                    )
        written.append(path)
    if "json" in formats:
        for record in records:
            payload = {
                "gate": record.gate,
                "method": record.method,
                "passes": record.passes,
                "shots": record.shots,
                "seed": record.seed,
                "errors": [matrix.tolist() for matrix in record.errors],
                "diamond_norms": _float_list(record.diamond_norms),
                "differential_diamonds": _float_list(record.differential_diamonds),
                "infidelities": _float_list(record.infidelities),
                "mean_error": record.mean_error.tolist(),
                "beta_fits": {
                    name: (asdict(fit) if fit is not None else None)
                    for name, fit in record.beta_fits.items()
                },
            }
            path = output_dir / (
                f"record_{record.gate}_{record.method}"
                f"_N{record.passes}_ns{record.shots}.json"
            )
            path.write_text(json.dumps(payload) + "\n")
            written.append(path)
    return written


def load_records(output_dir: str | Path) -> list[TomographyRecord]:
    """Read back every record JSON written by :func:`emit`."""
    records = []
    for path in sorted(Path(output_dir).glob("record_*.json")):
        data = json.loads(path.read_text())
        records.append(
            TomographyRecord(
                gate=data["gate"],
                method=data["method"],
                passes=data["passes"],
                shots=data["shots"],
                seed=data["seed"],
                errors=[np.array(matrix) for matrix in data["errors"]],
                diamond_norms=data["diamond_norms"],
                differential_diamonds=data["differential_diamonds"],
                infidelities=data["infidelities"],
            )
        )
    return records
