"""Command line front end: sampled reports over immersion charts.

Every run prints one JSON document to standard output.  Floats are written
with 17 significant digits and the document depends only on the argument
vector, so identical invocations produce byte-identical output; wall-clock
timing goes to standard error.  Exit codes: 0 success, 1 an
--assert-expected check failed, 2 unusable input (bad arguments, file or
expression syntax, insufficient jet order), 3 geometric refusal (the chart
is not immersed, is umbilic or not ideal, or the canonical direction field
has no torsion).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

from . import __version__, gallery
from .classical import ClassicalContext, classical_data, ddvv_from_forms
from .errors import (
    ChartBlowUp,
    DegenerateCurve,
    DomainError,
    EvalError,
    InsufficientOrder,
    IntegrableDistribution,
    NotIdealPoint,
    NotImmersed,
    NotLorentz,
    OrderError,
    ParseError,
    SchemaError,
    ShapeError,
    SingularJet,
    UmbilicPoint,
)
from .ideal import SQRT6, _analyze, _package_invariants, verdict_from_scalars
from .immersion import parse_immersion, sample_points
from .moebius import integrability_residuals, moebius_data

EXIT_OK = 0
EXIT_ASSERT = 1
EXIT_INPUT = 2
EXIT_REFUSED = 3

# input problems: the request itself cannot be carried out as stated
_INPUT_ERRORS = (ParseError, SchemaError, InsufficientOrder, OrderError,
                 ShapeError, EvalError, NotLorentz, OSError, KeyError)

# geometric refusals: the chart is fine but the quantity is undefined there
_REFUSALS = (UmbilicPoint, NotImmersed, NotIdealPoint, IntegrableDistribution,
             DegenerateCurve, ChartBlowUp, SingularJet, DomainError)


# ---------------------------------------------------------------------------
# deterministic JSON


def _jdump(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return "null"
        return f"{obj:.17g}"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(
            json.dumps(str(k)) + ":" + _jdump(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_jdump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(doc: dict, json_path: str | None) -> None:
    text = _jdump(doc) + "\n"
    sys.stdout.write(text)
    if json_path:
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


# ---------------------------------------------------------------------------
# per-command runners


class RunResult:
    def __init__(self, records, aggregate, csv_header, csv_rows, failures):
        self.records = records
        self.aggregate = aggregate
        self.csv_header = csv_header
        self.csv_rows = csv_rows
        self.failures = failures


def _point_list(p) -> list[float]:
    return [float(v) for v in p]


def _gauge_name(flag: str) -> str:
    return "V0" if flag == "v0" else "raw"


def _run_ddvv(spec, pts, args, expected) -> RunResult:
    records = []
    rows = []
    for idx, p in enumerate(pts):
        ctx = ClassicalContext(spec, p, order=2)
        if ctx.is_umbilic():
            raise UmbilicPoint(
                f"{spec.name} is totally umbilic at sample point {idx}; "
                "the ideality defect vanishes identically there")
        data = classical_data(ctx)
        rep = ddvv_from_forms(data.h, data.H, data.c, tol=args.tol)
        rec = {
            "index": idx,
            "point": _point_list(p),
            "s": float(rep.s),
            "H_norm2": float(rep.H_norm2),
            "s_N": float(rep.s_N),
            "slack": float(rep.slack),
            "ideal": bool(rep.ideal),
        }
        records.append(rec)
        rows.append([idx, *rec["point"], rec["s"], rec["H_norm2"],
                     rec["s_N"], rec["slack"], rec["ideal"]])
    slacks = [r["slack"] for r in records]
    aggregate = {
        "n_points": len(records),
        "min_slack": min(slacks),
        "max_slack": max(slacks),
        "all_ideal": all(r["ideal"] for r in records),
    }
    failures = []
    if expected is not None:
        want = expected.get("ideal")
        if want is True and not aggregate["all_ideal"]:
            failures.append("expected every sample point to satisfy equality")
        if want is False:
            if any(r["ideal"] for r in records):
                failures.append("expected no sample point to satisfy equality")
            floor = expected.get("min_slack")
            if floor is not None and aggregate["min_slack"] <= floor:
                failures.append(
                    f"expected slack > {floor:.17g} everywhere, found "
                    f"{aggregate['min_slack']:.17g}")
    header = ["index", "u1", "u2", "u3", "s", "H_norm2", "s_N", "slack",
              "ideal"]
    return RunResult(records, aggregate, header, rows, failures)


_CONSTANT_VALUES = {
    "mu": lambda r: r["mu"],
    "L": lambda r: r["L"],
    "rho": lambda r: r["rho"],
    "nu": lambda r: r["rho"] / SQRT6,
    "Fhat": lambda r: r["Fhat"],
    "theta12_E3": lambda r: r["theta12"][2],
}


def _run_invariants(spec, pts, args, expected) -> RunResult:
    g = _gauge_name(args.gauge)
    records = []
    rows = []
    # each point is analyzed on its own, with the torsion-positive sign
    # rule, so a record depends only on its point and not on sample order
    for idx, p in enumerate(pts):
        data = moebius_data(spec, p, order=args.order)
        cf = _analyze(spec, p, gauge=g, order=args.order, ltol=args.ltol,
                      data=data)
        inv = _package_invariants(cf, partial=False)
        rec = {
            "index": idx,
            "point": _point_list(p),
            "rho": float(data.rho),
            "mu": float(inv.mu),
            "U": float(inv.U),
            "V": float(inv.V),
            "L": float(inv.L),
            "G": float(inv.G),
            "lam": float(inv.lam),
            "Fhat": float(inv.Fhat),
            "Ghat": float(inv.Ghat),
            "omega": [float(v) for v in inv.omega_coeffs],
            "domega": [float(v) for v in inv.domega],
            "theta12": [float(v) for v in inv.theta12_coeffs],
            "Omega12": [float(v) for v in inv.Omega12_coeffs],
        }
        records.append(rec)
        rows.append([idx, *rec["point"], rec["rho"], rec["mu"], rec["U"],
                     rec["V"], rec["L"], rec["G"], rec["lam"], rec["Fhat"],
                     rec["Ghat"], *rec["omega"], *rec["domega"],
                     *rec["theta12"]])
    aggregate = {
        "n_points": len(records),
        "max_abs_U": max(abs(r["U"]) for r in records),
        "max_abs_V": max(abs(r["V"]) for r in records),
        "max_abs_G": max(abs(r["G"]) for r in records),
        "min_abs_L": min(abs(r["L"]) for r in records),
        "max_domega": max(max(abs(d) for d in r["domega"]) for r in records),
    }
    failures = []
    if expected is not None:
        for name in expected.get("zeros", ()):
            worst = max(abs(r[name]) for r in records)
            if worst > args.tol:
                failures.append(
                    f"expected {name} = 0, found |{name}| up to {worst:.17g}")
        for name, want in expected.get("constants", {}).items():
            getter = _CONSTANT_VALUES.get(name)
            if getter is None:
                continue
            worst = max(abs(getter(r) - want) for r in records)
            if worst > args.tol:
                failures.append(
                    f"expected {name} = {want:.17g}, off by {worst:.17g}")
        if expected.get("L_zero") is False and \
                aggregate["min_abs_L"] <= args.ltol:
            failures.append(
                f"expected nonvanishing torsion, found |L| down to "
                f"{aggregate['min_abs_L']:.17g}")
    header = ["index", "u1", "u2", "u3", "rho", "mu", "U", "V", "L", "G",
              "lam", "Fhat", "Ghat", "omega1", "omega2", "omega3",
              "domega12", "domega13", "domega23", "theta12_1", "theta12_2",
              "theta12_3"]
    return RunResult(records, aggregate, header, rows, failures)


def _run_theorem_b(spec, pts, args, expected) -> RunResult:
    g = _gauge_name(args.gauge)
    records = []
    rows = []
    fhats = []
    max_dw = 0.0
    for idx, p in enumerate(pts):
        cf = _analyze(spec, p, gauge=g, order=args.order, ltol=args.ltol)
        inv = _package_invariants(cf, partial=False)
        rec = {
            "index": idx,
            "point": _point_list(p),
            "Fhat": float(inv.Fhat),
            "domega": [float(v) for v in inv.domega],
        }
        records.append(rec)
        rows.append([idx, *rec["point"], rec["Fhat"], *rec["domega"]])
        fhats.append(rec["Fhat"])
        max_dw = max(max_dw, max(abs(d) for d in rec["domega"]))
    verdict = verdict_from_scalars(fhats, max_dw, tol=args.tol)
    aggregate = {
        "n_points": verdict.n_points,
        "classification": verdict.classification,
        "closed": verdict.closed,
        "Fhat_sign": verdict.Fhat_sign,
        "max_domega": float(verdict.max_domega),
        "fhat_min": float(verdict.fhat_min),
        "fhat_max": float(verdict.fhat_max),
    }
    failures = []
    if expected is not None:
        want = expected.get("classification")
        if want is not None and verdict.classification != want:
            failures.append(
                f"expected classification {want}, got "
                f"{verdict.classification}")
    header = ["index", "u1", "u2", "u3", "Fhat", "domega12", "domega13",
              "domega23"]
    return RunResult(records, aggregate, header, rows, failures)


def _run_hopf_check(spec, pts, args, expected) -> RunResult:
    g = _gauge_name(args.gauge)
    records = []
    rows = []
    for idx, p in enumerate(pts):
        cf = _analyze(spec, p, gauge=g, order=args.order, ltol=args.ltol)
        inv = _package_invariants(cf, partial=False)
        rec = {
            "index": idx,
            "point": _point_list(p),
            "G": float(inv.G),
            "domega": [float(v) for v in inv.domega],
        }
        records.append(rec)
        rows.append([idx, *rec["point"], rec["G"], *rec["domega"]])
    max_g = max(abs(r["G"]) for r in records)
    max_dw = max(max(abs(d) for d in r["domega"]) for r in records)
    aggregate = {
        "n_points": len(records),
        "satisfied": bool(max_g < args.tol and max_dw < args.tol),
        "max_G": max_g,
        "max_domega": max_dw,
    }
    failures = []
    if expected is not None:
        want = expected.get("hopf")
        if want is not None and aggregate["satisfied"] != want:
            failures.append(
                f"expected lift criterion {want}, got "
                f"{aggregate['satisfied']}")
    header = ["index", "u1", "u2", "u3", "G", "domega12", "domega13",
              "domega23"]
    return RunResult(records, aggregate, header, rows, failures)


_RESIDUAL_FIELDS = ("codazzi_A", "ricci_C", "codazzi_B", "gauss",
                    "ricci_normal", "trace")


def _run_residuals(spec, pts, args, expected) -> RunResult:
    records = []
    rows = []
    for idx, p in enumerate(pts):
        data = moebius_data(spec, p, order=args.order)
        res = integrability_residuals(spec, p, order=args.order, data=data)
        rec = {"index": idx, "point": _point_list(p)}
        for name in _RESIDUAL_FIELDS:
            rec[name] = float(getattr(res, name))
        rec["max"] = float(res.max_residual())
        records.append(rec)
        rows.append([idx, *rec["point"],
                     *[rec[name] for name in _RESIDUAL_FIELDS], rec["max"]])
    aggregate = {"n_points": len(records)}
    for name in _RESIDUAL_FIELDS:
        aggregate["max_" + name] = max(r[name] for r in records)
    aggregate["max_overall"] = max(r["max"] for r in records)
    failures = []
    if expected is not None and aggregate["max_overall"] > args.tol:
        failures.append(
            f"expected structure-equation residuals below {args.tol:.17g}, "
            f"found {aggregate['max_overall']:.17g}")
    header = ["index", "u1", "u2", "u3", *_RESIDUAL_FIELDS, "max"]
    return RunResult(records, aggregate, header, rows, failures)


_RUNNERS = {
    "ddvv": _run_ddvv,
    "invariants": _run_invariants,
    "theorem-b": _run_theorem_b,
    "hopf-check": _run_hopf_check,
    "residuals": _run_residuals,
}


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wintgen",
        description="Conformal-invariant reports for three-dimensional "
                    "charts in five-dimensional space forms.")
    sub = parser.add_subparsers(dest="command", required=True)

    pg = sub.add_parser("gallery", help="inspect the built-in example charts")
    pg.add_argument("action", choices=["list"])
    pg.add_argument("--json", metavar="PATH", default=None,
                    help="also write the document to this file")

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", dest="spec_file", metavar="FILE",
                     help="immersion description file")
    src.add_argument("--example", metavar="NAME",
                     help="built-in example name (see: wintgen gallery list)")
    common.add_argument("--points", type=int, default=20, metavar="N",
                        help="number of sample points (default 20)")
    common.add_argument("--seed", type=int, default=0, metavar="S",
                        help="sampling seed (default 0)")
    common.add_argument("--order", type=int, default=5, metavar="K",
                        help="jet truncation order (default 5)")
    common.add_argument("--tol", type=float, default=1e-7, metavar="T",
                        help="report tolerance (default 1e-7)")
    common.add_argument("--ltol", type=float, default=1e-6, metavar="T",
                        help="torsion cutoff |L| for the direction field "
                             "(default 1e-6)")
    common.add_argument("--gauge", choices=["raw", "v0"], default="raw",
                        help="frame normalization for the invariant record")
    common.add_argument("--json", metavar="PATH", default=None,
                        help="also write the document to this file")
    common.add_argument("--csv", metavar="PATH", default=None,
                        help="write per-point records to this file")
    common.add_argument("--assert-expected", action="store_true",
                        help="exit 1 unless the report matches the gallery "
                             "entry's expected record (needs --example)")

    helps = {
        "ddvv": "normal-scalar-curvature inequality report",
        "invariants": "conformal invariants U, V, L, G, lambda, Fhat per "
                      "point",
        "theorem-b": "closedness of the distinguished 1-form and the sign "
                     "of Fhat, folded into the space-form verdict",
        "hopf-check": "circle-lift criterion: G = 0 and the 1-form closed",
        "residuals": "structure-equation residuals per point",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _load_source(args):
    if args.example is not None:
        entry = gallery.by_name(args.example)
        return entry.spec, entry.expected, {"example": args.example}
    with open(args.spec_file, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_immersion(text), None, {"file": args.spec_file}


def _error_doc(command: str, exc: Exception) -> dict:
    msg = str(exc)
    if isinstance(exc, KeyError) and exc.args:
        msg = str(exc.args[0])
    doc = {
        "schema": 1,
        "tool": {"name": "wintgen", "version": __version__},
        "command": command,
        "error": {"kind": type(exc).__name__, "message": msg},
    }
    if isinstance(exc, ParseError):
        doc["error"]["line"] = exc.line
        doc["error"]["col"] = exc.col
    return doc


def _analysis_command(args) -> int:
    try:
        spec, expected, source = _load_source(args)
    except _INPUT_ERRORS as exc:
        _emit(_error_doc(args.command, exc), args.json)
        return EXIT_INPUT
    if args.points < 1:
        _emit(_error_doc(args.command, SchemaError("--points must be >= 1")),
              args.json)
        return EXIT_INPUT

    pts = sample_points(spec.domain, args.points, args.seed)
    base = {
        "schema": 1,
        "tool": {"name": "wintgen", "version": __version__},
        "command": args.command,
        "source": source,
        "parameters": {
            "points": args.points,
            "seed": args.seed,
            "order": args.order,
            "tol": args.tol,
            "ltol": args.ltol,
            "gauge": args.gauge,
        },
    }
    checked = expected if args.assert_expected else None
    try:
        result = _RUNNERS[args.command](spec, pts, args, checked)
    except _REFUSALS as exc:
        doc = dict(base)
        doc["refusal"] = {"kind": type(exc).__name__, "message": str(exc)}
        _emit(doc, args.json)
        return EXIT_REFUSED
    except _INPUT_ERRORS as exc:
        _emit(_error_doc(args.command, exc), args.json)
        return EXIT_INPUT

    doc = dict(base)
    doc["sample"] = [_point_list(p) for p in pts]
    doc["records"] = result.records
    doc["aggregate"] = result.aggregate
    if args.assert_expected:
        doc["assert"] = {"passed": not result.failures,
                         "failures": result.failures}
    _emit(doc, args.json)
    if args.csv:
        _write_csv(args.csv, result.csv_header, result.csv_rows)
    if args.assert_expected and result.failures:
        return EXIT_ASSERT
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _gallery_command(args) -> int:
    entries = []
    for e in gallery.all_entries():
        entries.append({
            "name": e.name,
            "ambient": {"kind": e.spec.ambient.kind,
                        "curvature": float(e.spec.ambient.c)},
            "domain": [[float(lo), float(hi)] for lo, hi in e.spec.domain],
            "has_text_form": e.expression_text is not None,
            "expected": _jsonable(e.expected),
        })
    doc = {
        "schema": 1,
        "tool": {"name": "wintgen", "version": __version__},
        "command": "gallery-list",
        "entries": entries,
    }
    _emit(doc, args.json)
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for bad usage; keep its codes
        return int(exc.code or 0)
    if getattr(args, "assert_expected", False) and args.example is None:
        print("wintgen: --assert-expected requires --example",
              file=sys.stderr)
        return EXIT_INPUT

    start = time.perf_counter()
    try:
        if args.command == "gallery":
            return _gallery_command(args)
        return _analysis_command(args)
    finally:
        elapsed = time.perf_counter() - start
        print(f"# elapsed {elapsed:.3f}s", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
