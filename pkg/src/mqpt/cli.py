"""Command-line interface.

Subcommands: ``run`` (batch experiment grid from a config file),
``recover`` (single-pass error from a measured multipass channel),
``metrics`` (fidelity / diamond norm of a channel against a target), and
``populations`` (repeated-application basis-state populations).  Exit
codes: 0 success, 2 configuration error, 3 solver non-convergence.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .channels import (
    ErrorMatrix,
    LiouvilleSuperoperator,
    PauliTransferMatrix,
    liouville_from_ptm,
)
from .exceptions import ConfigError, ConvergenceError
from .experiments import emit, load_config, multipass_populations, run_batch
from .metrics import diamond_bound_check, diamond_norm, process_fidelity
from .recovery import extended_sylvester_recover, iterative_recover, sylvester_recover_involutary
from .serialize import channel_to_dict, load_channel

_METHOD_ALIASES = {"iterative": "iterative", "sylvester": "sylvester", "extsylv": "extended_sylvester"}


def _load_ptm(path: str, what: str) -> PauliTransferMatrix:
    try:
        channel = load_channel(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load {what} from {path}: {exc}") from exc
    if isinstance(channel, ErrorMatrix):
        return PauliTransferMatrix(n=channel.n, matrix=channel.matrix)
    if not isinstance(channel, PauliTransferMatrix):
        raise ConfigError(f"{what} file must hold a 'ptm' channel, got {type(channel).__name__}")
    return channel


def _cmd_run(args) -> int:
    config = load_config(args.config, seed=args.seed, output_dir=args.out)
    records = run_batch(config)
    written = emit(records, config.output_dir)
    for path in written:
        print(path)
    return 0


def _cmd_recover(args) -> int:
    target = _load_ptm(args.target, "target")
    multipass = _load_ptm(args.multipass, "multipass channel")
    method = _METHOD_ALIASES[args.method]
    if method == "iterative":
        result = iterative_recover(target, multipass, args.passes)
        error, converged = result.error, result.converged
        print(f"iterations={result.iterations} residual={result.residual:.3e}", file=sys.stderr)
    elif method == "sylvester":
        if (args.passes - 1) % 2 != 0:
            raise ConfigError("sylvester method needs an odd pass count")
        error, converged = sylvester_recover_involutary(target, multipass, (args.passes - 1) // 2), True
    else:
        result = extended_sylvester_recover(target, multipass, args.passes)
        error, converged = result.error, result.converged
        print(f"iterations={result.iterations} residual={result.residual:.3e}", file=sys.stderr)
    payload = json.dumps(channel_to_dict(error))
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(payload + "\n")
    else:
        print(payload)
    if not converged:
        print("warning: recovery did not reach tolerance", file=sys.stderr)
        return 3
    return 0


def _cmd_metrics(args) -> int:
    target = _load_ptm(args.target, "target")
    channel = _load_ptm(args.channel, "channel")
    if target.n != channel.n:
        raise ConfigError("target and channel act on different qubit counts")
    fidelity, infidelity = process_fidelity(target, channel)
    error = ErrorMatrix(n=target.n, matrix=channel.matrix - target.matrix)
    diamond = diamond_norm(error)
    print(
        json.dumps(
            {
                "fidelity": fidelity,
                "infidelity": infidelity,
                "diamond_norm": diamond,
                "bound_holds": diamond_bound_check(max(0.0, infidelity), diamond, 2**target.n),
            }
        )
    )
    return 0


def _cmd_populations(args) -> int:
    try:
        channel = load_channel(args.channel)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load channel from {args.channel}: {exc}") from exc
    if isinstance(channel, PauliTransferMatrix):
        superop = liouville_from_ptm(channel)
    elif isinstance(channel, LiouvilleSuperoperator):
        superop = channel
    else:
        raise ConfigError("populations needs a 'ptm' or 'liouville' channel file")
    print("m,p00,p01,p10,p11")
    for m in range(args.max_m + 1):
        p = multipass_populations(superop, m)
        print(",".join([str(m)] + [repr(v) for v in p]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqpt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a batch experiment grid")
    run.add_argument("--config", required=True, help="flat key = value configuration file")
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--out", default=None, help="override the output directory")
    run.set_defaults(func=_cmd_run)

    recover = sub.add_parser("recover", help="recover the single-pass error matrix")
    recover.add_argument("--target", required=True, help="target channel JSON (ptm)")
    recover.add_argument("--multipass", required=True, help="measured multipass channel JSON (ptm)")
    recover.add_argument("--passes", type=int, required=True)
    recover.add_argument("--method", choices=sorted(_METHOD_ALIASES), required=True)
    recover.add_argument("--out", default=None, help="write the error matrix JSON here")
    recover.set_defaults(func=_cmd_recover)

    metrics = sub.add_parser("metrics", help="fidelity and diamond norm against a target")
    metrics.add_argument("--target", required=True)
    metrics.add_argument("--channel", required=True)
    metrics.set_defaults(func=_cmd_metrics)

    populations = sub.add_parser("populations", help="repeated-application populations from |00>")
    populations.add_argument("--channel", required=True)
    populations.add_argument("--max-m", type=int, default=100)
    populations.set_defaults(func=_cmd_populations)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
