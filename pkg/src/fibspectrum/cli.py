"""Command-line front end for band covers, Cantor metrics, sweeps and oracle checks.

Every artifact carries the run configuration: a ``"config"`` key in JSON and
a ``# config: {...}`` first line in CSV.  Exit codes: 0 ok, 1 usage,
2 resolution or convergence failure, 3 guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional

import numpy as np

from .approximants import ResolutionExceeded, BandCover, band_cover
from .config import ConfigError, SpectralConfig, load_config
from .oracle import ConvergenceFailure, TooLarge as OracleTooLarge, chain_eigenvalues, potential
from .sumset import TooLarge as SumTooLarge
from .sweeps import (GapRow, LevelPolicyError, MetricsRow, SumsetRow, gap_rows,
                     metrics_for_cover, metrics_row, run_ordered, sumset_row)
from .trace import TraceOverflow

EXIT_OK, EXIT_USAGE, EXIT_RESOLUTION, EXIT_GUARD = 0, 1, 2, 3
DEFAULT_ORACLE_N = 610
DEFAULT_ORACLE_LEVEL = 14
DEFAULT_CONTAINMENT = 0.02


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _clean(v):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def render_json(cfg: SpectralConfig, payload: dict) -> str:
    doc = dict(payload)
    doc["config"] = cfg.to_dict()
    return json.dumps(_clean(doc), indent=1) + "\n"


def render_csv(cfg: SpectralConfig, columns, rows, extra: Optional[dict] = None) -> str:
    record = cfg.to_dict()
    record.update(extra or {})
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(_clean(record), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def read_csv_artifact(text: str) -> tuple[dict, list[dict]]:
    """Inverse of the CSV layout: (config, rows as dicts of strings)."""
    first, _, rest = text.partition("\n")
    if not first.startswith("# config: "):
        raise ValueError("missing config line")
    cfg = json.loads(first[len("# config: "):])
    return cfg, list(csv.DictReader(io.StringIO(rest)))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# commands ---------------------------------------------------------------

def cmd_bands(cfg: SpectralConfig) -> str:
    if cfg.k is None:
        raise UsageError("bands needs -k/--level")
    bc = band_cover(cfg.V, cfg.k, cfg.tol)
    if cfg.format == "csv":
        return render_csv(cfg, ("left", "right"), bc.cover.to_list())
    payload = bc.to_dict()
    payload["max_band_length"] = bc.max_band_length
    payload["total_length"] = bc.total_length
    return render_json(cfg, payload)


def _row_dict(row) -> dict:
    return {c: getattr(row, c) for c in row.COLUMNS}


def cmd_metrics(cfg: SpectralConfig, cover_path: Optional[str] = None) -> str:
    if cover_path:
        with open(cover_path, encoding="utf-8") as fh:
            bc = BandCover.from_dict(json.load(fh))
        cfg = cfg.replace(V=bc.V, k=bc.k, tol=bc.tol)
        row = metrics_for_cover(bc)
    else:
        if cfg.V == 0 and cfg.k is None:
            raise UsageError("metrics at V=0 needs -k/--level")
        row = metrics_row(cfg.V, "auto" if cfg.k is None else cfg.k, cfg.tol)
        cfg = cfg.replace(k=row.k)
    if cfg.format == "csv":
        return render_csv(cfg, MetricsRow.COLUMNS, [[getattr(row, c) for c in MetricsRow.COLUMNS]])
    payload = _row_dict(row)
    payload["presentation"] = "decreasing-length"
    payload["theta_is_upper_estimate"] = True
    return render_json(cfg, payload)


def cmd_sweep(cfg: SpectralConfig, what: str, values: list[float], k_policy: str,
              threads: int) -> str:
    if not values or any(v <= 0 for v in values):
        raise UsageError("sweep needs positive couplings")
    policy = "auto" if k_policy == "auto" else int(k_policy)
    if what == "metrics":
        rows = run_ordered(lambda v: metrics_row(v, policy, cfg.tol), values, threads)
        cols = MetricsRow.COLUMNS
    elif what == "sumset":
        rows = run_ordered(lambda v: sumset_row(v, policy, cfg.tol), values, threads)
        cols = SumsetRow.COLUMNS
    elif what == "gaps":
        # warm the per-coupling caches in parallel; tracking itself is sequential
        if policy != "auto":
            run_ordered(lambda v: band_cover(v, policy, cfg.tol), values, threads)
        rows = gap_rows(values, tol=cfg.tol)
        cols = GapRow.COLUMNS
    else:
        raise UsageError(f"unknown sweep target {what!r}")
    run = {"what": what, "k_policy": k_policy, "values": values}
    if cfg.format == "csv":
        return render_csv(cfg, cols, [[getattr(r, c) for c in cols] for r in rows], run)
    return render_json(cfg, {**run, "rows": [_row_dict(r) for r in rows]})


def cmd_oracle(cfg: SpectralConfig, boundary: str, threshold: float) -> str:
    N = cfg.N or DEFAULT_ORACLE_N
    k = cfg.k if cfg.k is not None else DEFAULT_ORACLE_LEVEL
    cfg = cfg.replace(N=N, k=k)
    chain = chain_eigenvalues(potential(cfg.V, cfg.omega, N), boundary)
    cover = band_cover(cfg.V, k, cfg.tol).cover
    eig = chain.eigenvalues
    dist = cover.distance(eig)
    first = np.searchsorted(eig, cover.lo, side="left")
    hit = first < eig.size
    hit[hit] = eig[first[hit]] <= cover.hi[hit]
    empty_bands = int(np.sum(~hit))
    if cfg.format == "csv":
        return render_csv(cfg, ("index", "eigenvalue", "distance_to_cover"),
                          [[i, float(e), float(d)] for i, (e, d) in enumerate(zip(eig, dist))])
    return render_json(cfg, {
        "N": N, "boundary": chain.boundary, "eigenvalues": eig.tolist(),
        "containment": {"k": k, "threshold": threshold, "max_distance": float(dist.max()),
                        "n_outside": int(np.sum(dist > threshold)), "n_bands": len(cover),
                        "bands_without_eigenvalue": empty_bands},
    })


# parser -----------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("-V", "--coupling", type=float, dest="V")
    p.add_argument("-k", "--level", type=int, dest="k")
    p.add_argument("--tol", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", metavar="FILE", help="key = value file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fibspectrum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bands", help="band cover B_k as JSON or CSV")
    _common(p)

    p = sub.add_parser("metrics", help="thickness, denseness, dimension bounds, box dimension")
    _common(p)
    p.add_argument("--cover", metavar="FILE", help="read a band-cover JSON instead of computing")

    p = sub.add_parser("sweep", help="one row per coupling")
    _common(p)
    p.add_argument("--what", choices=("metrics", "gaps", "sumset"), required=True)
    p.add_argument("--values", required=True, help="comma-separated couplings, e.g. 0.4,0.2,0.1")
    p.add_argument("--k-policy", default="auto", help="'auto' or a fixed level")

    p = sub.add_parser("oracle", help="finite-chain eigenvalues and containment in B_k")
    _common(p)
    p.add_argument("-N", type=int, dest="N")
    p.add_argument("--boundary", choices=("dirichlet", "periodic"), default="dirichlet")
    p.add_argument("--threshold", type=float, default=DEFAULT_CONTAINMENT)
    return parser


def _config_from(args) -> SpectralConfig:
    base = load_config(args.config) if args.config else {}
    cfg = SpectralConfig(**base)
    return cfg.replace(V=args.V, k=args.k, tol=args.tol, omega=args.omega, format=args.format,
                       N=getattr(args, "N", None))


def _parse_values(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise UsageError(f"bad coupling list {text!r}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        cfg = _config_from(args)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        if args.command == "bands":
            text = cmd_bands(cfg)
        elif args.command == "metrics":
            text = cmd_metrics(cfg, args.cover)
        elif args.command == "sweep":
            if args.k_policy != "auto" and not args.k_policy.isdigit():
                raise UsageError("--k-policy must be 'auto' or an integer")
            text = cmd_sweep(cfg, args.what, _parse_values(args.values), args.k_policy,
                             args.threads)
        else:
            text = cmd_oracle(cfg, args.boundary, args.threshold)
    except (UsageError, ConfigError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"fibspectrum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResolutionExceeded, ConvergenceFailure, LevelPolicyError) as exc:
        print(f"fibspectrum: resolution failure: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (SumTooLarge, OracleTooLarge, TraceOverflow) as exc:
        print(f"fibspectrum: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"fibspectrum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
