"""Command-line front end.

Subcommands: ``fit``, ``mcs``, ``local-mcs``, ``mixture-mcs``,
``distances``, ``simulate``. Model lists are JSON files of specs like
``{"family": "lognormal", "params": {"mu": 2, "sigma2": 0.5},
"weight": {"kind": "length_biased"}}`` (params and weight optional for
fit targets). Exit codes: 0 success, 1 statistical degeneracy, 2
usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from .confidence_set import build_local_mcs, build_mcs
from .errors import EstimationError
from .estimation import Dataset, OptimizerOptions, fit_qmle
from .families import family_from_spec
from .harness import ExperimentConfig, run_experiment
from .metrics import DensityHandle, hellinger, kl_divergence, l2_distance
from .mixture import MixtureCandidate, RegionDensity, build_mixture_set
from .weights import Region, weighted_family_from_spec


def ingest(path, column: str | None = None) -> Dataset:
    """Read a sample from a text file.

    Without ``column``: one decimal number per line, blank lines and
    ``#`` comments skipped. With ``column``: a CSV file with a header row,
    reading the named column. Parse failures report the line number.
    """
    path = Path(path)
    values: list[float] = []
    with open(path, newline="") as fh:
        if column is None:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    values.append(float(line))
                except ValueError:
                    raise ValueError(
                        f"{path}: line {lineno}: could not parse {line!r} as a number"
                    ) from None
        else:
            reader = csv.DictReader(row for row in fh if not row.startswith("#"))
            if reader.fieldnames is None or column not in reader.fieldnames:
                raise ValueError(f"{path}: no column named {column!r}")
            for record in reader:
                cell = record[column]
                try:
                    values.append(float(cell))
                except (TypeError, ValueError):
                    raise ValueError(
                        f"{path}: line {reader.line_num}: could not parse {cell!r} as a number"
                    ) from None
    if not values:
        raise ValueError(f"{path}: no data values found")
    return Dataset(values)


def _load_model_specs(path) -> list[dict]:
    with open(path) as fh:
        payload = json.load(fh)
    if isinstance(payload, dict):
        payload = [payload]
    if not isinstance(payload, list) or not payload:
        raise ValueError(f"{path}: expected a JSON list of model specs")
    return payload


def _load_reference(path) -> DensityHandle:
    with open(path) as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict) or "params" not in spec:
        raise ValueError(f"{path}: a reference density needs explicit 'params'")
    return DensityHandle.from_family(family_from_spec(spec))


def _options(args) -> OptimizerOptions:
    return OptimizerOptions(
        max_iter=args.max_iter, tol=args.tol, restarts=args.restarts, seed=args.seed
    )


def _emit(payload, args, csv_rows=None, csv_header=None) -> None:
    """Write JSON (full precision) or a CSV table (4 decimals) to --output or stdout."""
    if args.format == "csv" and csv_rows is not None:
        lines = [",".join(csv_header)]
        for row in csv_rows:
            cells = []
            for key in csv_header:
                val = row.get(key, "")
                cells.append(f"{val:.4f}" if isinstance(val, float) else str(val))
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_fit(args) -> int:
    data = ingest(args.input, args.column)
    results = []
    for spec in _load_model_specs(args.models):
        wf = weighted_family_from_spec(spec)
        fit = fit_qmle(wf, data, _options(args))
        results.append(
            {
                "model": fit.name,
                "theta_hat": dict(zip(fit.wf.base.param_names, fit.theta_hat.tolist())),
                "loglik_total": fit.loglik_total,
                "mean_loglik": fit.mean_loglik,
                "converged": fit.converged,
                "n": fit.n,
            }
        )
    csv_rows = [
        {
            "model": r["model"],
            "theta_hat": ";".join(f"{k}={v:.6g}" for k, v in r["theta_hat"].items()),
            "loglik_total": r["loglik_total"],
            "mean_loglik": r["mean_loglik"],
            "converged": r["converged"],
        }
        for r in results
    ]
    _emit(
        {"n": data.n, "fits": results},
        args,
        csv_rows=csv_rows,
        csv_header=["model", "theta_hat", "loglik_total", "mean_loglik", "converged"],
    )
    return 0


def _cmd_mcs(args) -> int:
    data = ingest(args.input, args.column)
    candidates = [weighted_family_from_spec(s) for s in _load_model_specs(args.models)]
    result = build_mcs(candidates, data, args.alpha, _options(args))
    _emit(
        result.to_dict(),
        args,
        csv_rows=result.table_rows(),
        csv_header=["hypothesis", "statistic", "conclusion"],
    )
    return 0


def _cmd_local_mcs(args) -> int:
    data = ingest(args.input, args.column)
    candidates = [family_from_spec(s) for s in _load_model_specs(args.models)]
    region = Region(args.region[0], args.region[1])
    result = build_local_mcs(candidates, data, region, args.alpha, _options(args))
    _emit(
        result.to_dict(),
        args,
        csv_rows=result.table_rows(),
        csv_header=["hypothesis", "statistic", "conclusion"],
    )
    return 0


def _cmd_mixture_mcs(args) -> int:
    data = ingest(args.input, args.column)
    left = [family_from_spec(s) for s in _load_model_specs(args.left_models)]
    right = [family_from_spec(s) for s in _load_model_specs(args.right_models)]
    reference = _load_reference(args.reference) if args.reference else None
    mixture = build_mixture_set(
        left,
        right,
        data,
        split=args.partition,
        alpha=args.alpha,
        beta=args.beta,
        reference=reference,
        options=_options(args),
    )
    _emit(
        mixture.to_dict(),
        args,
        csv_rows=mixture.table_rows(),
        csv_header=["combining_models", "alpha_opt", "hellinger_sq", "l2_sq"],
    )
    return 0


def _candidates_from_json(payload: dict) -> list[MixtureCandidate]:
    """Rebuild mixture candidates from a mixture-mcs JSON output."""
    split = float(payload["partition"])
    left_region = Region(-np.inf, split)
    right_region = Region(split, np.inf)
    out = []
    for cand in payload["candidates"]:
        f_fam = family_from_spec(cand["f"])
        g_fam = family_from_spec(cand["g"])
        out.append(
            MixtureCandidate(
                f_component=None,
                g_component=None,
                f_density=RegionDensity.build(f_fam, left_region),
                g_density=RegionDensity.build(g_fam, right_region),
                alpha_opt=float(cand["alpha_opt"]),
                psi_at_opt=(np.nan if cand.get("psi_at_opt") is None
                            else float(cand["psi_at_opt"])),
            )
        )
    return out


def _cmd_distances(args) -> int:
    with open(args.candidates) as fh:
        payload = json.load(fh)
    reference = _load_reference(args.reference)
    candidates = _candidates_from_json(payload)
    rows = []
    for cand in candidates:
        handle = DensityHandle.from_mixture(cand)
        h = hellinger(handle, reference, args.quad_tol)
        l2 = l2_distance(handle, reference, args.quad_tol)
        names = (
            cand.f_density.family.name,
            cand.g_density.family.name,
        )
        row = {
            "combining_models": f"{names[0]} + {names[1]}",
            "alpha_opt": cand.alpha_opt,
            "hellinger": h,
            "hellinger_sq": 0.5 * h**2,
            "l2": l2,
            "l2_sq": l2**2,
        }
        if args.kl:
            row["kl"] = kl_divergence(reference, handle, args.quad_tol)
        rows.append(row)
    header = ["combining_models", "alpha_opt", "hellinger", "hellinger_sq", "l2", "l2_sq"]
    if args.kl:
        header.append("kl")
    _emit({"distances": rows}, args, csv_rows=rows, csv_header=header)

    if args.plot:
        lo, hi = args.grid if args.grid else (reference.lower, reference.upper)
        grid = np.linspace(lo, hi, args.grid_points)
        if args.plot_target == "reference":
            dens = reference.pdf(grid)
        else:
            idx = int(args.plot_target)
            dens = candidates[idx].pdf(grid)
        with open(args.plot, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "density"])
            for g, d in zip(grid, dens):
                writer.writerow([f"{g:.6f}", f"{d:.8f}"])
    return 0


def _cmd_simulate(args) -> int:
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("WMCS_WORKERS", "1"))
    kwargs = dict(
        experiment=args.experiment,
        replications=args.replications,
        alpha=args.alpha,
        beta=args.beta,
        seed=args.seed,
        output_dir=args.output_dir,
        workers=workers,
        restarts=args.restarts,
        max_iter=args.max_iter,
        tol=args.tol,
    )
    if args.sample_sizes:
        kwargs["sample_sizes"] = tuple(args.sample_sizes)
    elif args.experiment == "example2":
        kwargs["sample_sizes"] = (1000,)
    cfg = ExperimentConfig(**kwargs)
    run_experiment(cfg)
    sys.stdout.write(f"wrote outputs to {cfg.output_dir}\n")
    return 0


def _region_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected LOWER,UPPER, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"could not parse region bounds {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wmcs",
        description="Weighted, local, and mixture model confidence sets for densities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    opt = argparse.ArgumentParser(add_help=False)
    opt.add_argument("--seed", type=int, default=0, help="seed for optimizer restarts")
    opt.add_argument("--restarts", type=int, default=5, help="optimizer starts per fit")
    opt.add_argument("--max-iter", type=int, default=500, help="iterations per start")
    opt.add_argument("--tol", type=float, default=1e-8, help="relative objective tolerance")

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--input", required=True, help="data file (numbers or CSV)")
    io.add_argument("--column", default=None, help="CSV column to read")
    io.add_argument("--output", default=None, help="output path (default: stdout)")
    io.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("fit", parents=[io, opt], help="fit each model to the data")
    p.add_argument("--models", required=True, help="JSON file of model specs")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("mcs", parents=[io, opt], help="build a model confidence set")
    p.add_argument("--models", required=True, help="JSON file of model specs")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(func=_cmd_mcs)

    p = sub.add_parser("local-mcs", parents=[io, opt],
                       help="confidence set restricted to a region")
    p.add_argument("--models", required=True, help="JSON file of family specs")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--region", type=_region_pair, required=True, metavar="LOWER,UPPER",
                   help="half-open region (lower, upper]; infinite bounds "
                        "spelled -inf/inf, e.g. --region=-inf,0")
    p.set_defaults(func=_cmd_local_mcs)

    p = sub.add_parser("mixture-mcs", parents=[io, opt],
                       help="mixture confidence set over a two-part partition")
    p.add_argument("--left-models", required=True, help="candidates for x <= partition")
    p.add_argument("--right-models", required=True, help="candidates for x > partition")
    p.add_argument("--partition", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=float, default=None,
                   help="per-partition level (default: full budget)")
    p.add_argument("--reference", default=None,
                   help="JSON spec of a known density for distance diagnostics")
    p.set_defaults(func=_cmd_mixture_mcs)

    p = sub.add_parser("distances", parents=[opt],
                       help="distances of mixture candidates to a reference density")
    p.add_argument("--candidates", required=True, help="JSON output of mixture-mcs")
    p.add_argument("--reference", required=True, help="JSON spec of the reference density")
    p.add_argument("--kl", action="store_true", help="also report KL(reference || candidate)")
    p.add_argument("--quad-tol", type=float, default=1e-6)
    p.add_argument("--output", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--plot", default=None, help="write (x, density) CSV plot data here")
    p.add_argument("--plot-target", default="reference",
                   help="'reference' or a candidate index")
    p.add_argument("--grid", nargs=2, type=float, default=None, metavar=("LO", "HI"))
    p.add_argument("--grid-points", type=int, default=401)
    p.set_defaults(func=_cmd_distances)

    p = sub.add_parser("simulate", parents=[opt], help="run a bundled simulation study")
    p.add_argument("--experiment", choices=("example1", "example2"), required=True)
    p.add_argument("--replications", type=int, default=1000)
    p.add_argument("--sample-sizes", nargs="+", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--output-dir", default="wmcs_out")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default: WMCS_WORKERS or 1)")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EstimationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
