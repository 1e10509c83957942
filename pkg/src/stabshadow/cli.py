"""Command-line drivers: acquire shadows, predict features, run experiments.

Exit codes: 0 success, 2 validation error (bad flags, specs or file
contents), 1 runtime failure (I/O and unexpected errors).
"""

from __future__ import annotations

import argparse
import sys
import time

from .experiments import (ExperimentConfig, config_from_mapping, parse_config_text,
                          run_experiment)
from .observables import parse_observables
from .rng import RandomStream
from .shadow import acquire_shadow, median_of_means_predict, plan_samples
from .shadow_io import ShadowFormatError, read_shadow_file, write_shadow_file
from .states import prep_from_spec


class ValidationError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stabshadow",
                                 description="classical-shadow acquisition and prediction")
    sub = ap.add_subparsers(dest="command", required=True)

    acq = sub.add_parser("acquire", help="acquire a shadow and write it to a file")
    acq.add_argument("--state", required=True, help="state spec, e.g. ghz:4, toric:3, noisy-ghz:8:0.2")
    acq.add_argument("--n-snapshots", type=int, required=True)
    acq.add_argument("--seed", type=int, default=0)
    acq.add_argument("--out", required=True)

    pre = sub.add_parser("predict", help="median-of-means prediction from a shadow file")
    pre.add_argument("--shadow", required=True)
    pre.add_argument("--observables", required=True)
    pre.add_argument("--k-batches", type=int, default=0,
                     help="batch count (default: ceil(2 ln(2M/0.05)) capped at N)")
    pre.add_argument("--out", default="", help="output CSV (default: stdout)")

    exp = sub.add_parser("experiment", help="run a named experiment, emit CSV")
    exp.add_argument("name", choices=("ghz-scaling", "ghz-noise", "toric", "witness"))
    exp.add_argument("--config", default="", help="flat key=value config file")
    exp.add_argument("--seed", type=int, default=None)
    exp.add_argument("--out", default=None)
    exp.add_argument("--n-snapshots", type=int, default=None)
    exp.add_argument("--k-batches", type=int, default=None)
    return ap


def _cmd_acquire(args) -> int:
    try:
        prep = prep_from_spec(args.state)
        if args.n_snapshots < 1:
            raise ValueError("--n-snapshots must be at least 1")
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    rng = RandomStream(args.seed)
    t0 = time.perf_counter()
    shadow = acquire_shadow(prep, args.n_snapshots, rng)
    dt = time.perf_counter() - t0
    write_shadow_file(shadow, args.out)
    rate = args.n_snapshots / dt if dt > 0 else float("inf")
    print(f"acquired {args.n_snapshots} snapshots of n={prep.n} in {dt:.3f}s "
          f"({rate:.1f} snapshots/s, {dt / args.n_snapshots * 1e3:.3f} ms/snapshot) -> {args.out}")
    return 0


def _cmd_predict(args) -> int:
    try:
        shadow = read_shadow_file(args.shadow)
    except FileNotFoundError as exc:
        raise ValidationError(str(exc)) from exc
    except ShadowFormatError as exc:
        raise ValidationError(f"bad shadow file: {exc}") from exc
    try:
        with open(args.observables) as fh:
            named = parse_observables(fh.read())
    except FileNotFoundError as exc:
        raise ValidationError(str(exc)) from exc
    except ValueError as exc:
        raise ValidationError(f"bad observables file: {exc}") from exc
    if not named:
        raise ValidationError("no observables in input")
    N = len(shadow)
    K = args.k_batches or min(N, plan_samples(len(named), 1.0, 0.1, 0.05).K)
    try:
        values = median_of_means_predict(shadow, [o for _i, o in named], K)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    lines = ["observable,estimate"]
    lines += [f"{oid},{v:.12g}" for (oid, _o), v in zip(named, values)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_experiment(args) -> int:
    mapping = {}
    if args.config:
        try:
            with open(args.config) as fh:
                mapping = parse_config_text(fh.read())
        except FileNotFoundError as exc:
            raise ValidationError(str(exc)) from exc
        except ValueError as exc:
            raise ValidationError(f"bad config: {exc}") from exc
    for key, val in (("seed", args.seed), ("out", args.out),
                     ("n_snapshots", args.n_snapshots), ("k_batches", args.k_batches)):
        if val is not None:
            mapping[key] = val
    try:
        cfg = config_from_mapping(mapping)
    except ValueError as exc:
        raise ValidationError(f"bad config: {exc}") from exc
    if not cfg.out:
        raise ValidationError("experiment needs an output path (--out or out= in config)")
    try:
        run_experiment(args.name, cfg)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    print(f"wrote {cfg.out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "acquire":
            return _cmd_acquire(args)
        if args.command == "predict":
            return _cmd_predict(args)
        return _cmd_experiment(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 1
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
