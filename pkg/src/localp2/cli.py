"""Command-line front end: dispatch, serialization, reproduction pipeline.

Complex numbers serialize as {"re": .., "im": ..} objects, matrices
row-major, rationals as {"num": .., "den": ..} strings; every subcommand's
JSON payload matches the schema of the same name under ``schemas/``.
Exit code 0 means no row of the emitted report was flagged.
"""

from __future__ import annotations

import argparse
import cmath
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import cohomology as coh
from . import mirror_geometry as geom
from . import mirror_map as mm
from . import picard_fuchs as pf
from . import specfun
from .errors import LocalP2Error
from .specfun import PrecisionConfig

SUBCOMMANDS = (
    "series", "continue", "monodromy", "periods", "transfer-matrix",
    "mirror-objects", "central-charges", "verify-appendix",
    "ktheory-table", "reproduce",
)

_DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class RunConfig:
    """Validated run settings shared by all subcommands."""

    tolerance: float = _DEFAULT_TOL
    y_values: tuple = ()
    output_format: str = "json"
    precision_mode: str = field(
        default_factory=lambda: os.environ.get("LOCALP2_PRECISION", "double"))
    out_path: str | None = None

    def __post_init__(self):
        if not (1e-12 <= self.tolerance <= 1e-3):
            raise LocalP2Error(
                f"tolerance must lie in [1e-12, 1e-3], got {self.tolerance:g}")
        if self.output_format not in ("json", "csv"):
            raise LocalP2Error(f"unknown output format {self.output_format!r}")
        if self.precision_mode not in ("double", "extended"):
            raise LocalP2Error(f"unknown precision mode {self.precision_mode!r}")
        object.__setattr__(self, "y_values",
                           tuple(complex(v) for v in self.y_values))

    def precision(self) -> PrecisionConfig:
        # PrecisionConfig accepts a narrower accuracy window than the CLI
        rel = min(max(self.tolerance, 1e-15), 1e-6)
        return PrecisionConfig(mode=self.precision_mode, target_rel_err=rel)

    def require_y(self) -> tuple:
        if not self.y_values:
            raise LocalP2Error("this subcommand needs at least one --y value")
        return self.y_values


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(
        f"expected a real or 're,im' pair, got {text!r}")


def _cplx(v) -> dict:
    v = complex(v)
    return {"re": float(v.real), "im": float(v.imag)}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="localp2",
        description="Mirror correspondence for the canonical bundle of the "
                    "projective plane: solutions, periods, transfer matrix.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--tol", type=float, default=_DEFAULT_TOL,
                        help="flagging tolerance (default %(default)g)")
        sp.add_argument("--y", action="append", type=_parse_complex,
                        default=None, metavar="RE[,IM]",
                        help="modulus sample; repeatable")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--precision", choices=("double", "extended"),
                        default=None)
        sp.add_argument("--out", default=None, metavar="PATH",
                        help="write the report here instead of stdout")
    return p


# ---------------------------------------------------------------------------
# subcommand bodies: each returns (payload dict, flagged row count)
# ---------------------------------------------------------------------------


def _solution_payload(triples, tol) -> tuple[dict, int]:
    rows = []
    flagged = 0
    for t in triples:
        bad = bool(t.err_estimate > tol)
        flagged += bad
        rows.append({
            "y": _cplx(t.y), "w0": _cplx(t.w0), "w1": _cplx(t.w1),
            "w2": _cplx(t.w2), "err_estimate": float(t.err_estimate),
            "flagged": bad,
        })
    return {"rows": rows, "n_flagged": flagged}, flagged


def _cmd_series(cfg: RunConfig) -> tuple[dict, int]:
    ys = cfg.y_values or (0.02,)
    return _solution_payload([pf.chf_expand(y) for y in ys], cfg.tolerance)


def _cmd_continue(cfg: RunConfig) -> tuple[dict, int]:
    ys = cfg.require_y()
    return _solution_payload(
        [pf.continue_solutions(y) for y in ys], cfg.tolerance)


def _cmd_monodromy(cfg: RunConfig) -> tuple[dict, int]:
    m = pf.monodromy_around_origin()
    mat = np.array(m)
    n = mat - np.eye(3, dtype=int)
    unipotent = bool(not np.any(n @ n @ n))
    payload = {
        "matrix": [[int(v) for v in row] for row in m],
        "unipotent": unipotent,
        "flagged": not unipotent,
    }
    return payload, 0 if unipotent else 1


def _cmd_periods(cfg: RunConfig) -> tuple[dict, int]:
    ys = cfg.require_y()
    quad = cfg.precision()
    rows = []
    flagged = 0
    for y in ys:
        pv = geom.periods(y, quad)
        bad = bool(max(pv.err) > cfg.tolerance)
        flagged += bad
        rows.append({
            "y": _cplx(y),
            "I": [_cplx(v) for v in pv.as_vector()],
            "err": [float(e) for e in pv.err],
            "flagged": bad,
        })
    return {"rows": rows, "n_flagged": flagged}, flagged


def _cmd_transfer_matrix(cfg: RunConfig) -> tuple[dict, int]:
    ys = cfg.y_values or (1e3, 2e3, 4e3)
    tm = mm.fit_transfer_matrix(ys, cfg.precision())
    payload = {
        "entries": [list(r) for r in tm.entries],
        "residual": tm.residual,
        "pre_round_dev": tm.pre_round_dev,
        "determinant": tm.determinant(),
        "first_column": list(tm.column(0)),
        "flagged": False,
    }
    return payload, 0


def _kclass_payload(k: coh.KClass) -> dict:
    lb = coh.basis_change(k, coh.Basis.LINE_BUNDLE)
    return {"basis": k.basis.value, "coords": list(k.coords),
            "line_bundle_coords": list(lb.coords)}


def _cmd_mirror_objects(cfg: RunConfig) -> tuple[dict, int]:
    ns = mm.mirror_objects()
    ok = mm.ako_twist_check()
    payload = {
        "objects": [
            {"name": f"N_{i}", **_kclass_payload(n)} for i, n in enumerate(ns)
        ],
        "twist_check": bool(ok),
    }
    return payload, 0 if ok else 1


def _cmd_central_charges(cfg: RunConfig) -> tuple[dict, int]:
    ys = cfg.y_values or (1e3,)
    quad = cfg.precision()
    tm = mm.fit_transfer_matrix((1e3, 2e3, 4e3), quad)
    rows = []
    flagged = 0
    for y in ys:
        for r in mm.central_charge_report(y, quad, tm):
            flagged += r["flagged"]
            rows.append({
                "y": _cplx(y), "brane": r["brane"],
                "charge_analytic": _cplx(r["charge_analytic"]),
                "charge_periods": _cplx(r["charge_periods"]),
                "abs_dev": float(r["abs_dev"]),
                "tolerance": float(r["tolerance"]),
                "flagged": bool(r["flagged"]),
            })
    return {"rows": rows, "n_flagged": flagged}, flagged


def _cmd_verify_appendix(cfg: RunConfig) -> tuple[dict, int]:
    rows = []
    flagged = 0
    for r in specfun.closed_form_checks(cfg.precision()):
        bad = bool(r["rel_err"] > cfg.tolerance)
        flagged += bad
        rows.append({
            "name": r["name"],
            "computed": _cplx(r["computed"]),
            "closed_form": _cplx(r["closed_form"]),
            "rel_err": float(r["rel_err"]),
            "flagged": bad,
        })
    return {"rows": rows, "n_flagged": flagged}, flagged


def _cmd_ktheory_table(cfg: RunConfig) -> tuple[dict, int]:
    duality = coh.pairing_table()
    ident = all(duality[i][j] == (1 if i == j else 0)
                for i in range(3) for j in range(3))
    payload = {
        "brane_charge_duality": duality,
        "hom_dimensions": mm.hom_dimensions(),
        "mirror_objects": [
            {"name": f"N_{i}", **_kclass_payload(n)}
            for i, n in enumerate(mm.mirror_objects())
        ],
        "duality_is_identity": bool(ident),
    }
    return payload, 0 if ident else 1


def _cmd_reproduce(cfg: RunConfig) -> tuple[dict, int]:
    """Full pipeline: appendix identities, solution cross-checks, periods,
    transfer fit, central charges.  Exit 0 only if every stage passes."""
    stages = []

    def stage(name, ok, detail):
        stages.append({"name": name, "pass": bool(ok), "detail": detail})

    checks = specfun.closed_form_checks(cfg.precision())
    worst = max(r["rel_err"] for r in checks)
    stage("appendix_closed_forms", worst <= 1e-10, f"worst rel err {worst:.3e}")

    devs = []
    # stay off the negative real axis, where the contour representation cuts
    for y in (0.02, -0.01 + 0.017j, 0.012 + 0.015j):
        t = pf.chf_expand(y)
        devs.append(abs(t.w1 - pf.series_w1(y)))
        devs.append(abs(t.w2 - pf.series_w2(y)))
        # contour route to w1: log term plus three times the plain sum
        mb_w1 = ((cmath.log(y) + 3.0 * pf.mellin_barnes(y, "plain"))
                 / (2j * math.pi))
        devs.append(abs(t.w1 - mb_w1))
    stage("solution_cross_checks", max(devs) <= 1e-9,
          f"worst pairwise dev {max(devs):.3e}")

    resid = pf.annihilation_residual((0.01, -0.015, 0.02j))
    stage("annihilator", resid <= 1e-10, f"residual {resid:.3e}")

    quad = cfg.precision()
    ys = (1e3, 2e3, 4e3)
    period_rows = {}
    ok_p = True
    detail_p = []
    for y in ys:
        pv = geom.periods(y, quad)
        period_rows[y] = pv
        gap = abs(pv.alternating_sum() - 1.0)
        bound = 10.0 * max(sum(pv.err), 1e-15)
        scale = abs(y) ** (-2.0 / 3.0)
        tail_dev = max(
            abs(pv.as_vector()[k] - geom.expected_period_tail(y, k)) / scale
            for k in range(3))
        ok_p &= gap <= bound and tail_dev <= 5e-3
        detail_p.append(f"y={y:g}: sum gap {gap:.2e}, tail dev {tail_dev:.2e}")
    stage("periods", ok_p, "; ".join(detail_p))

    tm = mm.fit_transfer_matrix(ys, quad)
    expected = ((1, 0, 0), (-1, 1, -1), (1, 1, 0))
    stage("transfer_matrix", tm.entries == expected,
          f"entries {tm.entries}, residual {tm.residual:.3e}")

    cc = mm.central_charge_report(1e3, quad, tm)
    n_flagged = sum(r["flagged"] for r in cc)
    stage("central_charges", n_flagged == 0, f"{n_flagged} flagged rows")

    ktab = mm.hom_dimensions()
    twist = mm.ako_twist_check()
    stage("ktheory", twist and ktab == [[1, 3, 3], [-3, 1, 3], [-3, -3, 1]],
          f"twist {twist}, hom table {ktab}")

    all_pass = all(s["pass"] for s in stages)
    payload = {"stages": stages, "all_pass": all_pass,
               "transfer_matrix": [list(r) for r in tm.entries]}
    return payload, 0 if all_pass else 1


_BODIES = {
    "series": _cmd_series,
    "continue": _cmd_continue,
    "monodromy": _cmd_monodromy,
    "periods": _cmd_periods,
    "transfer-matrix": _cmd_transfer_matrix,
    "mirror-objects": _cmd_mirror_objects,
    "central-charges": _cmd_central_charges,
    "verify-appendix": _cmd_verify_appendix,
    "ktheory-table": _cmd_ktheory_table,
    "reproduce": _cmd_reproduce,
}

_CSV_ABLE = {"series", "continue", "periods", "central-charges",
             "verify-appendix"}


def _csv_emit(command: str, payload: dict) -> str:
    out = io.StringIO()
    rows = payload["rows"]
    if command in ("series", "continue"):
        out.write("y_re,y_im,abs_w0,abs_w1,abs_w2,err_estimate\n")
        for r in rows:
            w = [math.hypot(r[f"w{i}"]["re"], r[f"w{i}"]["im"]) for i in range(3)]
            out.write(f'{r["y"]["re"]!r},{r["y"]["im"]!r},'
                      f'{w[0]!r},{w[1]!r},{w[2]!r},{r["err_estimate"]!r}\n')
    elif command == "periods":
        out.write("y_re,y_im,k,I_re,I_im,err\n")
        for r in rows:
            for k in range(3):
                out.write(f'{r["y"]["re"]!r},{r["y"]["im"]!r},{k},'
                          f'{r["I"][k]["re"]!r},{r["I"][k]["im"]!r},'
                          f'{r["err"][k]!r}\n')
    elif command == "central-charges":
        out.write("y_re,y_im,brane,analytic_re,analytic_im,"
                  "periods_re,periods_im,abs_dev,flagged\n")
        for r in rows:
            out.write(f'{r["y"]["re"]!r},{r["y"]["im"]!r},{r["brane"]},'
                      f'{r["charge_analytic"]["re"]!r},'
                      f'{r["charge_analytic"]["im"]!r},'
                      f'{r["charge_periods"]["re"]!r},'
                      f'{r["charge_periods"]["im"]!r},'
                      f'{r["abs_dev"]!r},{int(r["flagged"])}\n')
    else:
        out.write("name,rel_err,flagged\n")
        for r in rows:
            out.write(f'{r["name"]},{r["rel_err"]!r},{int(r["flagged"])}\n')
    return out.getvalue()


def dispatch(argv) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            tolerance=ns.tol,
            y_values=tuple(ns.y) if ns.y else (),
            output_format=ns.format,
            precision_mode=(ns.precision
                            or os.environ.get("LOCALP2_PRECISION", "double")),
            out_path=ns.out,
        )
        if cfg.output_format == "csv" and ns.command not in _CSV_ABLE:
            raise LocalP2Error(
                f"subcommand {ns.command} has no CSV form; use --format json")
        payload, flagged = _BODIES[ns.command](cfg)
    except LocalP2Error as exc:
        report = {"error": type(exc).__name__,
                  "context": {"command": ns.command, "message": str(exc)}}
        print(json.dumps(report, indent=2, sort_keys=True))
        return 1
    if cfg.output_format == "csv":
        text = _csv_emit(ns.command, payload)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out_path:
        with open(cfg.out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if flagged == 0 else 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
