"""Command-line front end.

Every subcommand prints a report with the shape
``{"checks": [{"name", "residual", "tolerance", "pass"}], "params": {...},
"pass": bool}`` plus subcommand-specific fields.  Exit status is 0 when every
check passes, 1 when one fails and 2 for invalid input.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from .algebra import Report, identity_suite_over_samples, verify_identity_suite
from .classical import (
    Q_matrix,
    build_H2_classical,
    build_Hg_classical,
    build_J2,
    build_Jg,
    combined_pair,
    conserved_Q,
    definiteness_scan,
    integrate,
    propagator,
)
from .errors import ResonantPUError
from .factorization import (
    REGION_COLUMNS,
    diagonalize_form,
    factorize,
    lambda_region_scan,
    projection_check,
    quad_form_matrix,
    transformed_hamiltonian,
)
from .params import ModelParams, derive_params, sample_param_list
from .spectrum import (
    MAX_CHAIN,
    build_chain,
    raise_with_Aplus,
    spectrum_table,
    verify_sector_actions,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


# -- deterministic output ---------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _csv_text(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else format(float(v), ".17g")
    return str(v)


def _summary_text(report: dict) -> str:
    lines = []
    for c in report["checks"]:
        flag = "PASS" if c["pass"] else "FAIL"
        lines.append(f"{flag}  {c['name']}  residual={_fmt_float(c['residual'])}  tol={_fmt_float(c['tolerance'])}")
    lines.append("overall: " + ("PASS" if report["pass"] else "FAIL"))
    return "\n".join(lines) + "\n"


# -- helpers ------------------------------------------------------------------

def _params(args) -> ModelParams:
    p = derive_params(args.nu2, args.omega_cap, args.eta)
    if args.perturb_kappa != 1.0:
        p = dataclasses.replace(p, kappa=p.kappa * args.perturb_kappa)
    return p


def _perturbed(p: ModelParams, factor: float) -> ModelParams:
    return p if factor == 1.0 else dataclasses.replace(p, kappa=p.kappa * factor)


def _emit(args, report: dict, csv_rows: list[dict] | None = None, columns: Sequence[str] = ()) -> int:
    text = dumps(report) + "\n" if args.json else _summary_text(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv and csv_rows is not None:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(_csv_text(csv_rows, columns))
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _finish(rep: Report, **extra) -> dict:
    out = rep.to_dict()
    out.update(extra)
    return out


# -- subcommands --------------------------------------------------------------

def cmd_verify(args) -> int:
    p = _params(args)
    rep = Report(params=p.as_dict())
    rep.extend(verify_identity_suite(p, args.tol), "point: ")
    if args.samples:
        samples = [_perturbed(q, args.perturb_kappa)
                   for q in sample_param_list(args.samples, args.seed, args.eta)]
        rep.extend(identity_suite_over_samples(samples, args.tol), f"{args.samples} samples: ")
    for k in range(1, args.k_max + 1):
        ch = build_chain(k, p, tol=max(args.tol, 1e-9))
        rep.add(f"chain k={k}: M+^k psi_{k - 1} = 0", ch.termination_residual, ch.tol)
        rep.add(f"chain k={k}: Jordan relations", max(ch.relation_residuals), ch.tol)
        rep.add(f"chain k={k}: H2 diagonal", max(ch.h2_residuals), ch.tol)
        rep.extend(verify_sector_actions(k, p, args.tol), f"sector k={k}: ")
    return _emit(args, _finish(rep))


def cmd_spectrum(args) -> int:
    if not 1 <= args.k_max <= MAX_CHAIN or not 0 <= args.n_max <= MAX_CHAIN:
        raise ResonantPUError(f"k_max and n_max must lie in [1, {MAX_CHAIN}] and [0, {MAX_CHAIN}]")
    p = _params(args)
    tol = max(args.tol, 1e-9)
    rep = Report(params=p.as_dict())
    table = spectrum_table(args.n_max, p)
    for row in table:
        rep.add(f"Hg psi_{row['n']} eigenvalue", row["residual_Hg"], tol)
        rep.add(f"H1 psi_{row['n']} eigenvalue", row["residual_H1"], tol)
    for n in range(args.n_max + 1):
        r = raise_with_Aplus(n, p)
        table[n]["Aplus_ratio"] = r.ratio
        table[n]["Aplus_sign"] = r.sign
        rep.add(f"|A+^{n} psi_0| = kappa^{n} (x-y)^{n} G", r.magnitude_residual, tol)
    chains = []
    h2 = []
    for k in range(1, args.k_max + 1):
        ch = build_chain(k, p, tol=tol)
        chains.append(ch.to_dict())
        rep.add(f"chain k={k}", max([ch.termination_residual, *ch.relation_residuals, *ch.h2_residuals]), tol)
        h2.append({"k": k, "H2_eigenvalue": p.eta * math.sqrt(2.0) * p.kappa * k, "multiplicity": k})
    extra = {
        "spectrum": table,
        "chains": chains,
        "h2_degeneracy": h2,
        "unbounded_below": p.alpha - p.beta < 0,
    }
    return _emit(args, _finish(rep, **extra), table,
                 ("n", "E_n", "residual_H1", "residual_Hg", "Aplus_ratio", "Aplus_sign"))


def _structure(spec: str, p: ModelParams):
    if spec == "jg":
        return build_Jg(), build_Hg_classical(p)
    if spec == "j2":
        return build_J2(p), build_H2_classical(p)
    if spec.startswith("combined:"):
        try:
            c1, c2 = (float(v) for v in spec.split(":", 1)[1].split(","))
        except ValueError:
            raise ResonantPUError(f"cannot parse structure {spec!r}") from None
        cp = combined_pair(c1, c2, p)
        return cp.Jbar, cp.Hbar
    raise ResonantPUError(f"unknown structure {spec!r}")


def _envelope_slope(t: np.ndarray, q: np.ndarray, period: float) -> float:
    """Least-squares slope of the per-period maximum of ``|q|``."""
    bins = np.floor(t / period).astype(int)
    tops, times = [], []
    for b in np.unique(bins)[:-1]:
        sel = bins == b
        i = np.argmax(np.abs(q[sel]))
        tops.append(abs(q[sel][i]))
        times.append(t[sel][i])
    if len(tops) < 2:
        return math.nan
    return float(np.polyfit(times, tops, 1)[0])


def cmd_simulate(args) -> int:
    p = _params(args)
    J, H = _structure(args.structure, p)
    z0 = np.array(args.z0, dtype=float)
    t, Z = integrate(J, H, z0, args.t_max, args.dt)
    Hg = build_Hg_classical(p)
    Qm = Q_matrix(p)
    Hv = np.einsum("ij,jk,ik->i", Z, Hg.Hmat, Z)
    Qv = np.einsum("ij,jk,ik->i", Z, Qm.Hmat, Z)
    exact = np.array([propagator(p, ti) @ z0 for ti in t])
    scale = max(1.0, float(np.max(np.abs(exact))))
    err = float(np.max(np.abs(Z - exact)))
    rep = Report(params=p.as_dict())
    rep.add("H drift", float(np.max(np.abs(Hv - Hv[0]))) / max(1.0, abs(Hv[0])), 1e-8)
    rep.add("Q drift", float(np.max(np.abs(Qv - Qv[0]))) / max(1.0, abs(Qv[0])), 1e-8)
    rep.add("max error vs exact solution", err / scale, 1e-6)
    q = -(Z[:, 0] + Z[:, 1])
    slope = _envelope_slope(t, q, 2 * math.pi / p.omega)
    rows = [
        {"t": ti, "x": z[0], "y": z[1], "px": z[2], "py": z[3], "H": h, "Q": qq}
        for ti, z, h, qq in zip(t, Z, Hv, Qv)
    ]
    extra = {
        "structure": args.structure,
        "z0": z0.tolist(),
        "t_max": args.t_max,
        "dt": args.dt,
        "steps": len(t) - 1,
        "final_state": Z[-1].tolist(),
        "q_envelope_slope": slope,
        "Q_consistency": abs(conserved_Q(z0, p) - Qv[0]),
    }
    return _emit(args, _finish(rep, **extra), rows, ("t", "x", "y", "px", "py", "H", "Q"))


def cmd_scan(args) -> int:
    scan = definiteness_scan(args.grid_c, args.grid_p, args.seed)
    region = lambda_region_scan(args.samples, args.seed)
    rep = Report(params={"grid_c": args.grid_c, "grid_p": args.grid_p, "seed": args.seed,
                         "samples": args.samples})
    rep.add("simultaneously positive-definite grid points", float(scan["count"]), 0.0)
    rep.add("samples with lambda- >= 0",
            float(sum(r["lambda_minus"] >= 0 for r in region["rows"])), 0.0)
    rep.add("lambda+ lambda- = (Omega - nu2)/2", region["product_residual"], args.tol)
    rows = region.pop("rows")
    extra = {"definiteness": scan, "lambda_region": region}
    return _emit(args, _finish(rep, **extra), rows, REGION_COLUMNS)


def cmd_factorize(args) -> int:
    p = _params(args)
    M = quad_form_matrix(p)
    res = factorize(p)
    _, _, _, U = diagonalize_form(M)
    rep = Report(params=p.as_dict())
    for name, v, lam in (("v+", res.v_plus, res.lambda_plus), ("v-", res.v_minus, res.lambda_minus)):
        rep.add(f"M {name} = lambda {name}", float(np.max(np.abs(M @ v - lam * v))) / max(1.0, abs(lam)), args.tol)
    rep.add("U U^T = 1", float(np.max(np.abs(U @ U.T - np.eye(2)))), args.tol)
    rep.add("lambda+ lambda- = (Omega - nu2)/2",
            abs(res.lambda_plus * res.lambda_minus - 0.5 * (p.Omega - p.nu2)) / max(1.0, p.gap), args.tol)
    th = transformed_hamiltonian(p)
    for k, r in sorted(th.closed_form_residuals.items()):
        rep.add(f"transformed H {k} closed form", r, args.tol)
    if res.lambda_plus_positive:
        rep.add("projection through state algebra", projection_check(p), args.tol)
    extra = res.to_dict()
    extra["transformed"] = th.coefficients()
    extra["normalizable_flag"] = bool(res.lambda_plus_positive)
    extra["a1_negative"] = bool(res.a1 < 0)
    extra["a2_negative"] = bool(res.a2 < 0)
    return _emit(args, _finish(rep, factorization=extra))


# -- argument parsing ---------------------------------------------------------

def _eta(text: str) -> int:
    v = int(text)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("eta must be 1 or -1")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nu2", type=float, default=2.0)
    common.add_argument("--omega-cap", type=float, default=1.0, help="the Omega parameter")
    common.add_argument("--eta", type=_eta, default=1)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--json", action="store_true", help="write the report as JSON")
    common.add_argument("--csv", metavar="PATH", help="write the tabular output to PATH")
    common.add_argument("--out", metavar="PATH", help="write the report to PATH instead of stdout")
    common.add_argument("--perturb-kappa", type=float, default=1.0, metavar="FACTOR",
                        help="multiply kappa by FACTOR after deriving it (negative control)")

    ap = argparse.ArgumentParser(prog="resonant-pu", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="operator identities and chain checks")
    v.add_argument("--samples", type=int, default=10, help="extra random parameter points")
    v.add_argument("--k-max", type=int, default=8)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("spectrum", parents=[common], help="eigenvalue ladder and Jordan chains")
    s.add_argument("--k-max", type=int, default=8)
    s.add_argument("--n-max", type=int, default=8)
    s.set_defaults(func=cmd_spectrum)

    m = sub.add_parser("simulate", parents=[common], help="classical trajectory")
    m.add_argument("--t-max", type=float, default=10.0)
    m.add_argument("--dt", type=float, default=1e-3)
    m.add_argument("--structure", default="jg", help="jg, j2 or combined:c1,c2")
    m.add_argument("--z0", type=float, nargs=4, default=[0.3, -0.7, 0.5, 0.2],
                   metavar=("X", "Y", "PX", "PY"))
    m.set_defaults(func=cmd_simulate)

    c = sub.add_parser("scan", parents=[common], help="definiteness and lambda-region scans")
    c.add_argument("--grid-c", type=_positive_int, default=100)
    c.add_argument("--grid-p", type=_positive_int, default=20)
    c.add_argument("--samples", type=_positive_int, default=200)
    c.set_defaults(func=cmd_scan)

    f = sub.add_parser("factorize", parents=[common], help="ground-state factorisation")
    f.set_defaults(func=cmd_factorize)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not (args.tol > 0 and math.isfinite(args.tol)):
        parser.error("--tol must be a positive finite number")
    try:
        return args.func(args)
    except (ResonantPUError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
