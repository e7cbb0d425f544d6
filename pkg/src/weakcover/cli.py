"""Command-line front end.

Subcommands
-----------
coverage   coverage at one or more radii, by approximation, Monte Carlo or both
table      recompute a published table next to the published numbers
curve      coverage c.d.f. in ``r``, or sweeps of coverage/quantization in ``delta``
tune       grid search for the best ``delta``
replay     rerun a recorded manifest and check the output is byte-identical

Exit codes: 0 success, 1 replay mismatch, 2 invalid arguments, 3 numerical
failure.  Every run that writes ``--out`` also writes a JSON manifest next to
it (``<out>.manifest.json`` unless ``--manifest`` is given).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import platform
import shlex
import sys
import time
from importlib import metadata

import numpy as np

from . import approx
from .designs import (
    BETA,
    FACTORIAL,
    SIMPLEX_S1,
    SIMPLEX_S2,
    SOBOL,
    VERTEX_WITH,
    VERTEX_WITHOUT,
    DesignSpec,
)
from .montecarlo import McConfig, _write_csv, mc_cdf_curve, mc_delta_profile, resolve_workers
from .quadrature import DEFAULT_TOL
from .simplexlab import coverage_sweep_from_profile, quantization_sweep_from_profile
from .tables import TABLES, reproduce_table, write_table_csv
from .tuner import APPROX, MONTE_CARLO, optimal_delta_for_coverage, optimal_delta_for_quantization

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3

FULL_SAMPLES = 1_000_000
FULL_REPS = 100

FAMILY_ALIASES = {
    "design1": BETA,
    "design2a": VERTEX_WITH,
    "design2b": VERTEX_WITHOUT,
    "design3": SOBOL,
    "design4": FACTORIAL,
    "s1": SIMPLEX_S1,
    "s2": SIMPLEX_S2,
}
for _f in (BETA, VERTEX_WITH, VERTEX_WITHOUT, SOBOL, FACTORIAL, SIMPLEX_S1, SIMPLEX_S2):
    FAMILY_ALIASES[_f] = _f
_APPROX_NAME = {BETA: approx.DESIGN1, VERTEX_WITH: approx.DESIGN2A, VERTEX_WITHOUT: approx.DESIGN2B}

COVERAGE_HEADER = ["family", "d", "n", "alpha", "delta", "r", "method", "value", "std_error"]


class UsageError(ValueError):
    """Invalid combination of flags (exit code 2)."""


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover - running from a source tree
        from . import __version__

        return __version__


# ------------------------------------------------------------------ parsing


def parse_grid(text) -> np.ndarray:
    """``"a:b:step"`` (inclusive of ``b``) or a comma/space separated list."""
    text = str(text).strip()
    if not text:
        return np.empty(0)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range grid must be start:stop:step, got {text!r}")
        a, b, h = map(float, parts)
        if h <= 0 or b < a:
            raise UsageError(f"bad range grid {text!r}")
        k = int(np.floor((b - a) / h + 1e-9))
        return np.round(a + h * np.arange(k + 1), 10)
    try:
        return np.array([float(x) for x in text.replace(",", " ").split()])
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}") from None


def _radii(values) -> np.ndarray:
    if values is None:
        return np.empty(0)
    out = np.concatenate([parse_grid(v) for v in values]) if values else np.empty(0)
    return out


def _add_design(p, delta_default=1.0):
    p.add_argument("--family", required=True, help="design1|design2a|design2b|design3|design4|s1|s2")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=delta_default)
    p.add_argument("--alpha", type=float, default=1.0, help="Beta shape parameter for design1")
    p.add_argument("--k", type=int, default=None, help="generators for design4 (default d - log2 n)")


def _add_budget(p):
    p.add_argument("--samples", type=int, default=None, help="Monte Carlo samples N (default 1e5)")
    p.add_argument("--reps", type=int, default=None, help="design replications R for random designs (default 40)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker threads (default COVER_THREADS or CPU count)")
    p.add_argument("--full-budget", action="store_true", help="raise defaults to N=1e6, R=100")


def _add_output(p):
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--manifest", default=None, help="manifest path (default <out>.manifest.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weakcover", description="Weak covering and quantization of the cube and simplex.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coverage", help="coverage at given radii")
    _add_design(p)
    p.add_argument("--r", nargs="+", required=True, help="radii: values, a,b,c lists or start:stop:step")
    p.add_argument("--method", choices=["approx", "mc", "both"], default=None,
                   help="default: both when an approximation exists, else mc")
    p.add_argument("--variant", choices=list(approx.VARIANTS), default=approx.REFINED)
    _add_budget(p)
    _add_output(p)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("table", help="recompute a published table")
    p.add_argument("--table", type=int, required=True)
    p.add_argument("--method", choices=["mc", "approx"], default=MONTE_CARLO)
    p.add_argument("--rows", nargs="+", default=None, help="row labels to include")
    p.add_argument("--ns", default=None, help="columns to include, e.g. 64,512")
    p.add_argument("--delta-grid", default=None, help="default 0.02:1:0.02")
    p.add_argument("--verbose", action="store_true", help="report each cell on stderr")
    _add_budget(p)
    _add_output(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("curve", help="c.d.f. in r, or delta sweeps")
    _add_design(p)
    p.add_argument("--r-grid", default=None, help="radii (required unless --quantization)")
    p.add_argument("--delta-grid", default=None, help="sweep delta instead of fixing --delta")
    p.add_argument("--quantization", action="store_true", help="sweep E theta over --delta-grid")
    p.add_argument("--method", choices=["mc", "approx"], default=MONTE_CARLO)
    p.add_argument("--variant", choices=list(approx.VARIANTS), default=approx.REFINED)
    _add_budget(p)
    _add_output(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("tune", help="grid search for the best delta")
    _add_design(p)
    p.add_argument("--objective", choices=["coverage", "quantization"], default="coverage")
    p.add_argument("--target", type=float, default=0.9)
    p.add_argument("--delta-grid", default=None, help="default 0.02:1:0.02")
    p.add_argument("--method", choices=["mc", "approx"], default=MONTE_CARLO)
    p.add_argument("--json", default=None, help="write the JSON summary here (default stderr)")
    _add_budget(p)
    _add_output(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("replay", help="rerun a manifest and compare outputs")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="where to write the regenerated output (default: discard)")
    p.set_defaults(func=cmd_replay)
    return parser


# ---------------------------------------------------------------- resolution


def resolve_family(name) -> str:
    try:
        return FAMILY_ALIASES[name.lower()]
    except KeyError:
        raise UsageError(f"unknown family {name!r}; choose from {sorted(set(FAMILY_ALIASES))}") from None


def resolve_spec(args, delta=None) -> DesignSpec:
    fam = resolve_family(args.family)
    if fam == BETA and not args.alpha > 0:
        raise UsageError("design1 needs --alpha > 0; alpha = 0 is the vertex law, use --family design2a")
    try:
        return DesignSpec(fam, args.d, args.n, args.delta if delta is None else delta, args.alpha, args.k, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def resolve_config(args) -> McConfig:
    samples = args.samples if args.samples is not None else (FULL_SAMPLES if args.full_budget else None)
    reps = args.reps if args.reps is not None else (FULL_REPS if args.full_budget else None)
    try:
        return McConfig(samples=samples or McConfig().samples, seed=args.seed, design_replications=reps,
                        workers=resolve_workers(args.threads))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _approx_name(spec: DesignSpec) -> str:
    name = _APPROX_NAME.get(spec.family)
    if name is None:
        raise UsageError(f"no approximation for family {spec.family!r}; use --method mc")
    if name == approx.DESIGN2B and spec.n >= 2**spec.d:
        raise UsageError(f"the design2b approximation needs n < 2^d = {2 ** spec.d}")
    return name


def _cfg_dict(cfg: McConfig, spec: DesignSpec | None = None) -> dict:
    reps = cfg.replications(spec.is_random) if spec is not None else cfg.design_replications
    return {"samples": cfg.samples, "seed": cfg.seed, "design_replications": reps, "workers": cfg.workers}


# ----------------------------------------------------------------- commands


def cmd_coverage(args, out):
    spec = resolve_spec(args)
    radii = _radii(args.r)
    if radii.size == 0:
        raise UsageError("no radii given")
    if np.any(radii < 0):
        raise UsageError("radii must be nonnegative")
    method = args.method or ("both" if spec.family in _APPROX_NAME else "mc")
    cfg = resolve_config(args)
    rows = []
    label = args.family
    info = {"design": spec.to_dict(), "quadrature": {"tol": DEFAULT_TOL, "variant": args.variant}}
    if method in ("approx", "both"):
        name = _approx_name(spec)
        vals, err, _ = approx.coverage_values(name, spec.d, spec.n, spec.delta, spec.alpha, radii, args.variant)
        rows += [(label, spec.d, spec.n, spec.alpha, spec.delta, float(r), f"approx-{args.variant}", float(v), float(err))
                 for r, v in zip(radii, vals)]
    if method in ("mc", "both"):
        curve = mc_cdf_curve(spec, radii, cfg=cfg)
        rows += [(label, spec.d, spec.n, spec.alpha, spec.delta, float(r), "mc", float(v), float(s))
                 for r, v, s in zip(radii, curve.values, curve.std_errors)]
        info["mc"] = _cfg_dict(cfg, spec)
    _write_csv(out, COVERAGE_HEADER, rows)
    return info


def cmd_table(args, out):
    if args.table not in TABLES:
        raise UsageError(f"--table must be one of {sorted(TABLES)}, got {args.table}")
    cfg = resolve_config(args)
    grid = parse_grid(args.delta_grid) if args.delta_grid else None
    if grid is not None and grid.size == 0:
        raise UsageError("empty delta grid")
    ns = [int(x) for x in parse_grid(args.ns)] if args.ns else None

    def progress(cell):
        if args.verbose:
            print(f"table {cell.table} | {cell.row} | n={cell.n}: {cell.value:.4f} ({cell.delta:.2f})"
                  f" published {cell.published_value:.3f} ({cell.published_delta:.2f}) [{cell.seconds:.1f}s]", file=sys.stderr)

    cells = reproduce_table(args.table, cfg, args.method, args.rows, ns, grid, progress=progress)
    write_table_csv(cells, out)
    return {"table": args.table, "mc": _cfg_dict(cfg), "quadrature": {"tol": DEFAULT_TOL}}


def cmd_curve(args, out):
    cfg = resolve_config(args)
    r_grid = parse_grid(args.r_grid) if args.r_grid is not None else np.empty(0)
    if not args.quantization and r_grid.size == 0:
        raise UsageError("empty r grid; pass --r-grid")
    if np.any(r_grid < 0):
        raise UsageError("radii must be nonnegative")
    if args.delta_grid is None:
        if args.quantization:
            raise UsageError("--quantization needs --delta-grid")
        spec = resolve_spec(args)
        if args.method == APPROX:
            name = _approx_name(spec)
            vals, err, _ = approx.coverage_values(name, spec.d, spec.n, spec.delta, spec.alpha, r_grid, args.variant)
            _write_csv(out, ["r", "value", "std_error"], [(float(r), float(v), float(err)) for r, v in zip(r_grid, vals)])
            return {"design": spec.to_dict(), "quadrature": {"tol": DEFAULT_TOL, "variant": args.variant}}
        mc_cdf_curve(spec, r_grid, cfg=cfg).to_csv(out)
        return {"design": spec.to_dict(), "mc": _cfg_dict(cfg, spec)}
    grid = parse_grid(args.delta_grid)
    if grid.size == 0:
        raise UsageError("empty delta grid")
    if np.any(grid < 0) or np.any(grid > 1):
        raise UsageError("delta grid must lie in [0, 1]")
    if args.method == APPROX:
        raise UsageError("delta sweeps are Monte Carlo only; use 'tune --method approx' for approximate optima")
    spec = resolve_spec(args)
    prof = mc_delta_profile(spec, grid, cfg=cfg)
    if args.quantization:
        sweep = quantization_sweep_from_profile(args.family, spec.d, spec.n, prof)
    else:
        sweep = coverage_sweep_from_profile(args.family, spec.d, spec.n, prof, r_grid)
    sweep.to_csv(out)
    return {"design": spec.to_dict(), "mc": _cfg_dict(cfg, spec)}


def cmd_tune(args, out):
    spec = resolve_spec(args)
    cfg = resolve_config(args)
    grid = parse_grid(args.delta_grid) if args.delta_grid else None
    if grid is not None and grid.size == 0:
        raise UsageError("empty delta grid")
    if args.method == APPROX:
        _approx_name(spec)
    if args.objective == "coverage":
        if not 0 < args.target < 1:
            raise UsageError("--target must lie in (0, 1)")
        res = optimal_delta_for_coverage(spec, args.target, grid, cfg, args.method)
    else:
        res = optimal_delta_for_quantization(spec, grid, cfg, args.method)
    res.to_csv(out)
    summary = res.to_json()
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(summary + "\n")
    else:
        print(summary, file=sys.stderr)
    return {"design": spec.to_dict(), "mc": _cfg_dict(cfg, spec), "summary": res.summary()}


def cmd_replay(args, out):
    try:
        with open(args.manifest) as fh:
            manifest = json.load(fh)
        argv = list(manifest["argv"])
        expected = manifest["output_sha256"]
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    argv = _strip_output_flags(argv)
    parsed = build_parser().parse_args(argv)
    buf = io.StringIO()
    parsed.func(parsed, buf)
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    digest = _sha256(text)
    same = digest == expected
    print(f"replay {'matches' if same else 'DIFFERS from'} {args.manifest} (sha256 {digest[:16]})", file=sys.stderr)
    return {"replayed": args.manifest, "match": same}


def _strip_output_flags(argv):
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a in ("--out", "--manifest", "--json"):
            skip = True
            continue
        if a.startswith(("--out=", "--manifest=", "--json=")):
            continue
        out.append(a)
    return out


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


# --------------------------------------------------------------------- main


def _write_manifest(path, argv, info, text, seconds):
    manifest = {
        "argv": list(argv),
        "command_line": "weakcover " + shlex.join(argv),
        "version": version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "wall_time_s": round(seconds, 3),
        "output_sha256": _sha256(text),
        **info,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    buf = io.StringIO()
    try:
        info = args.func(args, buf)
    except ArithmeticError as exc:
        print(f"weakcover: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"weakcover: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = buf.getvalue()
    if args.command == "replay":
        if args.out is None and text:
            sys.stdout.write(text)
        return EXIT_OK if info["match"] else EXIT_MISMATCH
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    manifest_path = args.manifest or (out_path + ".manifest.json" if out_path else None)
    if manifest_path:
        _write_manifest(manifest_path, argv, info, text, time.perf_counter() - t0)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())


__all__ = ["EXIT_MISMATCH", "EXIT_NUMERIC", "EXIT_OK", "EXIT_USAGE", "UsageError", "build_parser", "main", "parse_grid"]
