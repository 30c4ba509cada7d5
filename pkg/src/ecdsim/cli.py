"""Command-line experiment runner.

Subcommands emit the data behind the standard figure-class experiments
as CSV (default) or JSON. Every output embeds the full configuration,
master seed, git describe string and a UTC timestamp as metadata, and
numerical columns are written with repr so they round-trip losslessly.

Exit codes: 0 success, 2 configuration error, 3 capacity or accuracy
error, 4 numerical failure.

Monte Carlo streams derive from the master seed as
PCG64(SeedSequence([seed, *key])), so results are independent of
batching and thread count. Set ECDSIM_THREADS to cap BLAS threads.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import subprocess
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .circuits import EnsembleSpec
from .correlators import c1_closed, c2_closed, c3_closed_gaussian, mc_correlator
from .errors import EXIT_CODES, ConfigError
from .gaussian import OneModeGaussianParams
from .streams import substream
from .targets import (FockTarget, OneModeGaussianTarget, TmsvTarget,
                      coherent_target, sample_random_target,
                      target_energy_per_mode, vacuum_target)
from .training import TrainConfig, histories_to_csv, train
from .variance import (critical_depth, critical_energy, mc_gradient_variance,
                       shallow_variance, variance_bounds)


def parse_target(text: str):
    """Parse a target spec string, e.g. 'vacuum', 'coherent:gamma=2',
    'dsv:gamma=2,zeta=1.4436', 'gaussian:gamma=1j,tau=0.3,zeta=1',
    'fock:n=8', 'tmsv:zeta=1', 'random:Et=2,seed=7[,M=1][,epsilon=0.1]'.
    """
    kind, _, rest = text.partition(":")
    kv = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ConfigError(f"malformed target option {item!r}")
            kv[key.strip()] = val.strip()

    def popf(key, default=None):
        if key in kv:
            return complex(kv.pop(key))
        if default is None:
            raise ConfigError(f"target {kind!r} requires {key}=")
        return default

    if kind == "vacuum":
        out = vacuum_target()
    elif kind == "coherent":
        out = coherent_target(popf("gamma"))
    elif kind in ("dsv", "gaussian", "smsv"):
        gamma = popf("gamma", 0.0 if kind != "dsv" else None)
        tau = popf("tau", 0.0).real
        zeta = popf("zeta").real
        out = OneModeGaussianTarget(OneModeGaussianParams(gamma, tau, zeta))
    elif kind == "fock":
        out = FockTarget(int(popf("n").real))
    elif kind == "tmsv":
        out = TmsvTarget(popf("zeta").real)
    elif kind == "random":
        e_t = popf("Et").real
        seed = int(popf("seed", 0.0).real)
        m = int(popf("M", 1.0).real)
        eps = popf("epsilon", 0.1).real
        out = sample_random_target(m, e_t, eps, rng=substream(seed, 0x7A26))
    else:
        raise ConfigError(f"unknown target kind {kind!r}")
    if kv:
        raise ConfigError(f"unknown target options {sorted(kv)}")
    return out


def parse_grid(text: str) -> np.ndarray:
    """'lo:hi:n' = n log-spaced points; otherwise a comma list."""
    if ":" in text:
        lo, hi, n = text.split(":")
        return np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(n))
    return np.asarray([float(x) for x in text.split(",")])


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            capture_output=True, text=True, cwd=os.path.dirname(__file__))
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def make_metadata(args: argparse.Namespace) -> dict:
    config = {k: v for k, v in sorted(vars(args).items())
              if k != "func" and v is not None}
    return {
        "config": json.dumps(config, default=str),
        "seed": getattr(args, "seed", None),
        "rng": "PCG64(SeedSequence([seed, *key]))",
        "version": __version__,
        "git_describe": _git_describe(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def write_table(path, columns, rows, metadata, fmt="csv"):
    """Write a table with '#'-prefixed metadata (CSV) or a JSON mirror.
    Floats are written with repr for lossless round-tripping."""
    def fmt_cell(x):
        return repr(float(x)) if isinstance(x, (float, np.floating)) else x

    if fmt == "json":
        doc = {"metadata": metadata, "columns": list(columns),
               "rows": [[float(x) if isinstance(x, np.floating) else x
                         for x in row] for row in rows]}
        text = json.dumps(doc, indent=1)
        if path == "-":
            sys.stdout.write(text + "\n")
        else:
            with open(path, "w") as f:
                f.write(text + "\n")
        return
    f = sys.stdout if path == "-" else open(path, "w", newline="")
    try:
        for key, val in metadata.items():
            f.write(f"# {key} = {val}\n")
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt_cell(x) for x in row])
    finally:
        if f is not sys.stdout:
            f.close()


def read_table(path):
    """Load a CSV written by write_table: (metadata, columns, rows)."""
    metadata, columns, rows = {}, None, []
    with open(path, newline="") as f:
        for line in f:
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                metadata[key.strip()] = val.strip()
                continue
            cells = next(csv.reader([line]))
            if columns is None:
                columns = cells
            else:
                rows.append([float(c) if _floatlike(c) else c for c in cells])
    return metadata, columns, rows


def _floatlike(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def cmd_variance(args) -> int:
    target = parse_target(args.target)
    rows = []
    for e in parse_grid(args.energies):
        spec = EnsembleSpec(args.modes, args.layers, float(e))
        est = mc_gradient_variance(spec, target, k=args.k, N=args.samples,
                                   backend=args.backend, seed=args.seed,
                                   cutoff=args.cutoff)
        bounds = variance_bounds(args.modes, args.layers, target, float(e))
        rows.append([float(e), est.variance, est.se_variance, est.mean,
                     est.se_mean, bounds.lower, bounds.upper,
                     shallow_variance(args.modes, args.layers, target, float(e))])
    meta = make_metadata(args)
    meta["critical_energy"] = repr(critical_energy(args.layers, target))
    write_table(args.output, ["E", "variance", "se_variance", "mean",
                              "se_mean", "lower_bound", "upper_bound",
                              "shallow"], rows, meta, args.format)
    return 0


def cmd_correlators(args) -> int:
    target = parse_target(args.target)
    z = parse_grid(args.z) if args.z else None
    zt = parse_grid(args.z_tilde) if args.z_tilde else None
    rows = []
    for e in parse_grid(args.energies):
        e = float(e)
        if args.kind == "c1":
            closed = c1_closed(target, e)
        elif args.kind == "c2":
            closed = c2_closed(target, e, z)
        else:
            closed = c3_closed_gaussian(target, e, z, zt)
        row = [e, closed]
        if args.samples:
            est = mc_correlator(args.kind, target, e, z=z, z_tilde=zt,
                                N=args.samples, seed=args.seed)
            row += [est.value, est.std_error]
        rows.append(row)
    cols = ["E", "closed"] + (["mc", "mc_se"] if args.samples else [])
    write_table(args.output, cols, rows, make_metadata(args), args.format)
    return 0


def cmd_bounds_map(args) -> int:
    target = parse_target(args.target)
    rows = []
    for L in [int(x) for x in parse_grid(args.layer_grid)]:
        for e in parse_grid(args.energies):
            b = variance_bounds(args.modes, L, target, float(e))
            rows.append([L, float(e), np.log10(b.upper),
                         critical_depth(float(e), target)])
    write_table(args.output, ["L", "E", "log10_upper_bound", "critical_depth"],
                rows, make_metadata(args), args.format)
    return 0


def cmd_random_variance(args) -> int:
    rows = []
    for i in range(args.targets):
        target = sample_random_target(args.modes, args.target_energy,
                                      args.epsilon,
                                      rng=substream(args.seed, 0x7A26, i))
        for e in parse_grid(args.energies):
            spec = EnsembleSpec(args.modes, args.layers, float(e))
            est = mc_gradient_variance(spec, target, k=args.k,
                                       N=args.samples, backend=args.backend,
                                       seed=args.seed + 1000 * (i + 1),
                                       cutoff=args.cutoff)
            rows.append([i, float(e), est.variance, est.se_variance,
                         est.mean, est.se_mean])
    write_table(args.output, ["target", "E", "variance", "se_variance",
                              "mean", "se_mean"], rows, make_metadata(args),
                args.format)
    return 0


def cmd_train(args) -> int:
    target = parse_target(args.target)
    cfg = TrainConfig(
        spec=EnsembleSpec(args.modes, args.layers, args.initial_energy),
        target=target, steps=args.steps, optimizer=args.optimizer,
        learning_rate=args.learning_rate, backend=args.backend,
        cutoff=args.cutoff, seeds=tuple(int(s) for s in args.seeds.split(",")),
        freeze_beta=args.freeze_beta)
    histories = train(cfg)
    histories_to_csv(histories, args.output, make_metadata(args))
    return 0


def cmd_validate(args) -> int:
    """Fast oracle/invariant battery; prints one PASS line per check."""
    from .validate import run_checks
    failures = run_checks(verbose=True)
    return 0 if failures == 0 else 3


def _add_common(p, energies=True):
    p.add_argument("--output", "-o", default="-",
                   help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    if energies:
        p.add_argument("--energies", "-E", required=True,
                       help="'lo:hi:n' log-spaced or comma list")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ecdsim", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("variance", help="MC gradient variance vs bounds")
    p.add_argument("--modes", "-M", type=int, default=1)
    p.add_argument("--layers", "-L", type=int, required=True)
    p.add_argument("--target", "-t", required=True)
    p.add_argument("--samples", "-N", type=int, default=1000)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--backend", choices=("branch", "fock"), default="branch")
    p.add_argument("--cutoff", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("correlators", help="closed-form and MC C1/C2/C3")
    p.add_argument("--kind", choices=("c1", "c2", "c3"), default="c1")
    p.add_argument("--target", "-t", required=True)
    p.add_argument("--z", default=None)
    p.add_argument("--z-tilde", default=None)
    p.add_argument("--samples", "-N", type=int, default=0,
                   help="MC samples; 0 = closed form only")
    _add_common(p)
    p.set_defaults(func=cmd_correlators)

    p = sub.add_parser("bounds-map", help="log10 upper bound over (L, E)")
    p.add_argument("--modes", "-M", type=int, default=1)
    p.add_argument("--layer-grid", required=True)
    p.add_argument("--target", "-t", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_bounds_map)

    p = sub.add_parser("random-variance",
                       help="variance curves over sampled random targets")
    p.add_argument("--modes", "-M", type=int, default=1)
    p.add_argument("--layers", "-L", type=int, required=True)
    p.add_argument("--target-energy", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--targets", type=int, default=5)
    p.add_argument("--samples", "-N", type=int, default=1000)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--backend", choices=("branch", "fock"), default="branch")
    p.add_argument("--cutoff", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_random_variance)

    p = sub.add_parser("train", help="gradient-descent training histories")
    p.add_argument("--modes", "-M", type=int, default=1)
    p.add_argument("--layers", "-L", type=int, required=True)
    p.add_argument("--initial-energy", type=float, required=True)
    p.add_argument("--target", "-t", required=True)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default="adam")
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--backend", choices=("branch", "fock"), default="fock")
    p.add_argument("--cutoff", type=int, default=None)
    p.add_argument("--seeds", default="0")
    p.add_argument("--freeze-beta", action="store_true")
    _add_common(p, energies=False)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("validate", help="run the fast invariant suite")
    _add_common(p, energies=False)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    threads = os.environ.get("ECDSIM_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except tuple(EXIT_CODES) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES[type(exc)]


if __name__ == "__main__":
    sys.exit(main())
