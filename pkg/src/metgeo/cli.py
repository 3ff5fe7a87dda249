"""Command-line surface: dist, geodesic, explog, and check subcommands.

Exit codes are a stable contract for CI: 0 success, 1 verification
failure, 2 input error, 3 domain error.  Human-readable tables round to
six digits; machine output (JSON/CSV) always carries full double
precision.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .field import MetricField, field_geodesic, classify_fields, field_distance
from .fiber import (
    CaseTag,
    FiberPoint,
    NotInExpImage,
    OutOfDomain,
    exp_map,
    fiber_distance,
    inv_exp,
)
from .io import (
    FieldFile,
    dumps_canonical,
    field_file_document,
    load_field_file,
    save_field_file,
)
from .spd import SPD_TOLERANCE, InvalidInput, NotPositiveDefinite, fiber_norm
from .verify import (
    OracleConfig,
    bounds_sweep,
    cat0_sweep,
    field_cat0_sweep,
    oracle_corpus,
    oracle_sweep,
    speed_sweep,
)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_INPUT = 2
EXIT_DOMAIN = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--normalize-weights", action="store_true",
                   help="rescale grid weights to sum to one")
    p.add_argument("--tolerance", type=float, default=SPD_TOLERANCE,
                   help="relative eigenvalue tolerance for SPD ingestion")
    p.add_argument("--out", default=None, help="write machine-readable output here")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="machine-readable output format")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="metgeo",
        description="distances and minimal paths between tensor fields",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="distance between two named fields")
    p.add_argument("file")
    p.add_argument("field0")
    p.add_argument("field1")
    _add_common(p)

    p = sub.add_parser("geodesic", help="sample the minimal path between fields")
    p.add_argument("file")
    p.add_argument("field0")
    p.add_argument("field1")
    p.add_argument("--t-samples", type=int, default=9,
                   help="number of uniform time samples (>= 2)")
    _add_common(p)

    p = sub.add_parser("explog", help="inverse-exponential tangents per sample")
    p.add_argument("file")
    p.add_argument("field0")
    p.add_argument("field1")
    p.add_argument("--verify", action="store_true",
                   help="also check exp(tangent) reconstructs field1")
    _add_common(p)

    p = sub.add_parser("check", help="run a verification sweep")
    p.add_argument("mode", choices=("bounds", "cat0", "oracle", "speed"))
    p.add_argument("--trials", type=int, default=None,
                   help="sweep size (defaults: bounds/cat0 1000, speed 200, oracle 50)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--include-cone", action="store_true",
                   help="cat0: include cone-vertex triangle shapes")
    p.add_argument("--field-trials", type=int, default=0,
                   help="cat0: additionally sweep this many field triangles")
    p.add_argument("--pairs", default=None,
                   help="oracle: JSON corpus of endpoint pairs")
    p.add_argument("--waypoints", type=int, default=None)
    p.add_argument("--substeps", type=int, default=None)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--step-scale", type=float, default=None)
    p.add_argument("--out", default=None, help="write the report here")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return ap


def _load(args) -> FieldFile:
    try:
        return load_field_file(
            args.file,
            normalize_weights=args.normalize_weights,
            tolerance=args.tolerance,
        )
    except FileNotFoundError as exc:
        raise InvalidInput(f"cannot open {args.file!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{args.file}: invalid JSON ({exc})") from exc


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _case_name(tag: CaseTag) -> str:
    return tag.value


def cmd_dist(args) -> int:
    ff = _load(args)
    f0 = ff.field(args.field0)
    f1 = ff.field(args.field1)
    cls = classify_fields(f0, f1)
    rows = []
    for i, w, p0, p1 in zip(ff.grid.ids, ff.grid.weights, f0.values, f1.values):
        rows.append((i, float(w), fiber_distance(p0, p1), _case_name(cls.cases[i].tag)))
    d = field_distance(f0, f1)
    print(f"{'id':<12} {'weight':>10} {'d_x':>12} case")
    for i, w, dx, case in rows:
        print(f"{i:<12} {w:>10.6f} {dx:>12.6f} {case}")
    print(f"distance = {d!r}")
    if args.out is not None:
        if args.format == "csv":
            with open(args.out, "w", newline="") as fh:
                wr = csv.writer(fh)
                wr.writerow(["id", "weight", "d_x", "case"])
                for i, w, dx, case in rows:
                    wr.writerow([i, repr(w), repr(dx), case])
                wr.writerow(["__distance__", "", repr(d), ""])
        else:
            _write_text(args.out, dumps_canonical({
                "distance": d,
                "per_sample": {i: dx for i, _, dx, _ in rows},
                "case": {i: case for i, _, _, case in rows},
            }))
    return EXIT_OK


def cmd_geodesic(args) -> int:
    if args.t_samples < 2:
        raise InvalidInput("--t-samples must be at least 2")
    ff = _load(args)
    f0 = ff.field(args.field0)
    f1 = ff.field(args.field1)
    cls = classify_fields(f0, f1)
    times = np.linspace(0.0, 1.0, args.t_samples)
    fields = {}
    csv_rows = []
    for k, t in enumerate(times):
        ft = field_geodesic(f0, f1, float(t))
        fields[f"t_{k:04d}"] = ft
        for i, p in zip(ft.grid.ids, ft.values):
            csv_rows.append(
                (float(t), i, p.det_quarter_root(), _case_name(cls.cases[i].tag))
            )
    out_ff = FieldFile(grid=ff.grid, fields=fields)
    doc = field_file_document(out_ff)
    doc["times"] = [float(t) for t in times]
    text = dumps_canonical(doc)
    if args.out is None:
        sys.stdout.write(text)
    else:
        _write_text(args.out, text)
        with open(str(args.out) + ".csv", "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["t", "id", "det_quarter_root", "case"])
            for t, i, q, case in csv_rows:
                wr.writerow([repr(t), i, repr(q), case])
        print(f"wrote {args.out} and {args.out}.csv")
    return EXIT_OK


def cmd_explog(args) -> int:
    ff = _load(args)
    f0 = ff.field(args.field0)
    f1 = ff.field(args.field1)
    cls = classify_fields(f0, f1)
    offending = sorted(
        i for i, case in cls.cases.items() if case.tag is not CaseTag.RIEMANNIAN
    )
    if offending:
        print(
            "explog requires every sample to be in the Riemannian case; "
            f"offending ids: {', '.join(offending)}",
            file=sys.stderr,
        )
        return EXIT_DOMAIN
    tangents = {}
    max_norm_gap = 0.0
    for i, p0, p1 in zip(ff.grid.ids, f0.values, f1.values):
        h = inv_exp(p0.mat, p1.mat)
        tangents[i] = h
        norm = fiber_norm(p0.mat, h.mat)
        dx = fiber_distance(p0, p1)
        max_norm_gap = max(max_norm_gap, abs(norm - dx))
        print(f"{i}: |psi| = {norm:.6f}  d_x = {dx:.6f}")
    print(f"max | |psi| - d_x | = {max_norm_gap!r}")
    if args.verify:
        max_rec = 0.0
        for i, p0, p1 in zip(ff.grid.ids, f0.values, f1.values):
            rec = exp_map(p0.mat, tangents[i].mat, 1.0)
            scale = np.abs(p1.mat).max()
            max_rec = max(max_rec, np.abs(rec.mat - p1.mat).max() / scale)
        print(f"max reconstruction error = {max_rec!r}")
    if args.out is not None:
        _write_text(args.out, dumps_canonical({
            "tangents": {
                i: [[float(x) for x in row] for row in h.mat]
                for i, h in tangents.items()
            },
            "max_norm_gap": max_norm_gap,
        }))
    return EXIT_OK


def _load_pair_corpus(path, tolerance: float):
    with open(path) as fh:
        doc = json.load(fh)
    pairs = []
    for k, row in enumerate(doc["pairs"]):
        dim = int(row["dim"])

        def point(raw, where):
            if raw == "cone":
                return FiberPoint.cone(dim)
            m = np.asarray(raw, dtype=float)
            if m.shape != (dim, dim):
                raise InvalidInput(f"{where}: expected {dim}x{dim} matrix")
            return FiberPoint.from_matrix(m, tol=tolerance)

        pairs.append(
            (point(row["a0"], f"pairs[{k}].a0"), point(row["a1"], f"pairs[{k}].a1"))
        )
    return pairs


def cmd_check(args) -> int:
    cfg_kwargs = {}
    for name, attr in (
        ("waypoints", "waypoints"),
        ("quadrature_substeps", "substeps"),
        ("iterations", "iterations"),
        ("restarts", "restarts"),
        ("step_scale", "step_scale"),
    ):
        val = getattr(args, attr)
        if val is not None:
            cfg_kwargs[name] = val
    defaults = {"bounds": 1000, "cat0": 1000, "speed": 200, "oracle": 50}
    trials = args.trials if args.trials is not None else defaults[args.mode]
    if args.mode == "bounds":
        report = bounds_sweep(trials, seed=args.seed).to_dict()
    elif args.mode == "speed":
        report = speed_sweep(trials, seed=args.seed).to_dict()
    elif args.mode == "cat0":
        report = cat0_sweep(
            trials, seed=args.seed, include_cone=args.include_cone
        ).to_dict()
        if args.field_trials > 0:
            field_report = field_cat0_sweep(args.field_trials, seed=args.seed)
            report["field"] = field_report.to_dict()
            report["passed"] = report["passed"] and field_report.passed
    else:
        cfg = OracleConfig(seed=args.seed, **cfg_kwargs)
        if args.pairs is not None:
            pairs = _load_pair_corpus(args.pairs, SPD_TOLERANCE)
        else:
            pairs = oracle_corpus(seed=args.seed, pairs=trials)
        report = oracle_sweep(pairs, cfg=cfg, seed=args.seed).to_dict()
    report["mode"] = args.mode
    report["trials"] = trials
    text = dumps_canonical(report)
    if args.out is not None:
        _write_text(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_VERIFICATION


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handlers = {
        "dist": cmd_dist,
        "geodesic": cmd_geodesic,
        "explog": cmd_explog,
        "check": cmd_check,
    }
    try:
        return handlers[args.command](args)
    except InvalidInput as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotPositiveDefinite, NotInExpImage, OutOfDomain) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
