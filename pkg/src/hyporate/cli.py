"""Command-line front end.

Subcommands ``rates``, ``certify``, ``simulate``, ``bound`` and ``figure``
write CSV (header row, ``%.17g`` floats) or JSON (stable key order) to
``--out`` or stdout.  Exit codes: 0 success, 2 configuration error,
3 certification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import decay_bounds as bounds
from . import gt_sim
from . import modal_rates as mr
from . import spectral_lyapunov as sl
from ._numerics import bisect_root
from .errors import CertificateViolation, DefectiveSigma, HyporateError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CERT = 3

FIGURES = ("fig1_triangle", "fig2_lambdas", "fig3_deltas", "fig4_tilde", "fig5_gap",
           "fig6_hplus", "fig7_mutilde")
BOUND_KINDS = ("gt_line", "gt_ptilde", "nash_heat", "psi_heat", "psi_gaussian")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    return "%.17g" % float(x)


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def render_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _table(columns, rows, fmt: str) -> str:
    if fmt == "json":
        return render_json([dict(zip(columns, r)) for r in rows])
    return render_csv(columns, rows)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------

def _s_grid(args) -> np.ndarray:
    if args.points < 1:
        raise ConfigError("--points must be at least 1 (empty grid)")
    if not 0 < args.s_min <= args.s_max:
        raise ConfigError("need 0 < --s-min <= --s-max")
    if args.points == 1:
        return np.array([args.s_min])
    if args.s_min == args.s_max:
        raise ConfigError("--s-min equals --s-max but --points > 1")
    return np.geomspace(args.s_min, args.s_max, args.points)


def _t_grid(args) -> np.ndarray:
    if not 0 < args.t_min < args.t_max:
        raise ConfigError("need 0 < --t-min < --t-max")
    if args.per_decade < 1:
        raise ConfigError("--per-decade must be positive")
    return gt_sim.time_grid(args.t_max, args.t_min, args.per_decade)


def _sigma(args) -> float:
    if not (args.sigma > 0 and math.isfinite(args.sigma)):
        raise ConfigError("--sigma must be positive")
    return float(args.sigma)


def _eps(args):
    if args.eps is None:
        return None
    if not 0 < args.eps < 1:
        raise ConfigError("--eps must lie in (0, 1)")
    return float(args.eps)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

RATE_COLUMNS = ("s", "lambda0", "lambda1", "lambda2", "lambda2_tilde", "delta0", "delta1", "delta2", "delta2_tilde")


def cmd_rates(args) -> int:
    grid = _s_grid(args)
    curves = {v: mr.lambda_curve(v, grid) for v in ("lambda0", "lambda1", "lambda2", "lambda2_tilde")}
    rows = []
    for j, s in enumerate(grid):
        p = [curves[v].points[j] for v in ("lambda0", "lambda1", "lambda2", "lambda2_tilde")]
        rows.append((s, p[0].lam, p[1].lam, p[2].lam, p[3].lam, p[0].delta, p[1].delta, p[2].delta, p[3].delta))
    _emit(_table(RATE_COLUMNS, rows, args.format), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    sigma = _sigma(args)
    eps = _eps(args)
    if args.xi_max < 1:
        raise ConfigError("--xi-max must be positive")
    out = {"sigma": sigma, "xi_max": args.xi_max}
    try:
        c1 = sl.assemble_strategy1(sigma, xi_max=args.xi_max, eps=eps)
        c2 = sl.assemble_strategy2(sigma, xi_max=args.xi_max, eps=eps)
    except DefectiveSigma as exc:
        sys.stderr.write(f"DefectiveSigma: {exc}\n")
        return EXIT_CERT
    except CertificateViolation as exc:
        sys.stderr.write(f"CertificateViolation: {exc}\n")
        return EXIT_CERT
    best = c2 if c2.mult_const <= c1.mult_const else c1
    mu_bar, Xi = sl.uniform_gap(sigma)
    out.update({
        "rate": best.rate,
        "mult_const": best.mult_const,
        "norm_const": best.norm_const,
        "mu_bar": mu_bar,
        "Xi": repr(Xi),
        "theta": sl.theta_eps(eps) if sigma == 2.0 else sl.theta_of_sigma(sigma),
        "strategy1": _cert_json(c1),
        "strategy2": _cert_json(c2),
    })
    if eps is not None:
        out["eps"] = eps
    worst = min((r[3] for c in (c1, c2) for r in c.provenance["modes"] if r[3] is not None), default=0.0)
    out["min_residual"] = worst
    _emit(render_json(out), args.out)
    if worst < -sl.CERT_TOL:
        return EXIT_CERT
    return EXIT_OK


def _cert_json(c) -> dict:
    d = c.to_json()
    d["modes"] = [{"xi": xi, "family": fam, "cond": cond, "residual": res}
                  for xi, fam, cond, res in c.provenance["modes"]]
    return d


def _torus_certificate(sigma: float, eps, xi_max: int):
    if sigma == 2.0 and eps is None:
        raise DefectiveSigma("sigma = 2: the slowest modes are defective; supply --eps")
    return sl.assemble_strategy2(sigma, xi_max=xi_max, eps=eps)


def cmd_simulate(args) -> int:
    sigma = _sigma(args)
    eps = _eps(args)
    ts = _t_grid(args)
    if args.preset is None:
        args.preset = "cosine" if args.domain == "torus" else "gaussian"
    if args.domain == "torus":
        N = args.xi_max
        if N < 1:
            raise ConfigError("--xi-max (torus truncation N) must be positive")
        if args.preset not in gt_sim.PRESETS:
            raise ConfigError(f"unknown torus preset {args.preset!r}; expected one of {gt_sim.PRESETS}")
        try:
            cert = _torus_certificate(sigma, eps, N)
        except DefectiveSigma as exc:
            sys.stderr.write(f"DefectiveSigma: {exc}\n")
            return EXIT_CERT
        if args.preset == "worst_case":
            if not 0 < args.xi <= N:
                raise ConfigError("--xi must lie in 1..N")
            field0 = gt_sim.worst_case(args.xi, sigma, N, cert=cert)
        else:
            field0 = gt_sim.remove_mean(gt_sim.preset(args.preset, sigma, N))
        traj = gt_sim.torus_trajectory(field0, sigma, ts)
        report = gt_sim.verify_certificate(cert, traj)
    else:
        if sigma != 1.0:
            raise ConfigError("the line simulation is verified against bounds for --sigma 1")
        if args.preset != "gaussian":
            raise ConfigError("line preset must be 'gaussian'")
        field0 = gt_sim.gaussian_line()
        l2 = field0.norm_sq
        traj = gt_sim.line_trajectory(field0, sigma, ts)
        report = gt_sim.verify_bound(lambda t: bounds.gt_line_global_bound(t, 1.0, l2), traj)
    _emit(_table(("t", "norm_sq", "envelope", "ratio"), report.rows, args.format), args.out)
    sys.stderr.write(f"max ratio {report.max_ratio:.6g} at t = {report.t_at_max:.6g}; "
                     f"{'pass' if report.passed else 'FAIL'}\n")
    return EXIT_OK if report.passed else EXIT_CERT


def bound_rows(kind: str, ts, l1_sq: float, l2_sq: float, d: int = 1):
    rows = []
    for t in ts:
        t = float(t)
        if kind == "gt_line":
            e = bounds.gt_line_global_envelope(t, l1_sq, l2_sq)
        elif kind == "gt_ptilde":
            e = bounds.gt_line_ptilde_envelope(t, l1_sq, l2_sq)
        elif kind == "nash_heat":
            p = bounds.heat_profile(d, math.sqrt(l1_sq), math.sqrt(l2_sq))
            rows.append((t, bounds.nash_decay(t, l2_sq, p), math.nan))
            continue
        elif kind == "psi_heat":
            e = bounds.psi_envelope(t, bounds.heat_profile(d, math.sqrt(l1_sq), math.sqrt(l2_sq)))
        else:
            e = bounds.psi_envelope(t, bounds.gaussian_mode_profile(d, math.sqrt(l1_sq), math.sqrt(l2_sq)))
        rows.append((t, e.bound, e.argmin_R))
    return rows


def cmd_bound(args) -> int:
    ts = _t_grid(args)
    if args.kind not in BOUND_KINDS:
        raise ConfigError(f"unknown bound kind {args.kind!r}; expected one of {BOUND_KINDS}")
    if args.kind in ("gt_line", "gt_ptilde") and _sigma(args) != 1.0:
        raise ConfigError("line bounds are stated for --sigma 1")
    if args.preset == "gaussian":
        l1_sq, l2_sq = 1.0, gt_sim.gaussian_line().norm_sq
    elif args.preset == "custom":
        l1_sq, l2_sq = args.l1_sq, args.l2_sq
        if l1_sq is None or l2_sq is None or l1_sq < 0 or l2_sq < 0:
            raise ConfigError("custom preset needs nonnegative --l1-sq and --l2-sq")
    else:
        raise ConfigError("bound preset must be 'gaussian' or 'custom'")
    rows = bound_rows(args.kind, ts, l1_sq, l2_sq, args.dim)
    _emit(_table(("t", "bound", "argmin_R"), rows, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------

def _fig1(args):
    # the fixed triangle (lambda_m = 1) and the upper edge of {h1 <= 0} at s = 5
    s = 5.0
    cols = ("delta", "lambda_triangle", "lambda_h1")
    rows = []
    for d in np.linspace(0.0, 1.0, args.points + 1)[1:-1]:
        top = 2.0 * (1.0 - d)
        lams = np.linspace(0.0, top, 2001)[1:-1]
        neg = [j for j, lam in enumerate(lams) if mr.h1(d, lam, s) <= 0.0]
        if not neg:
            rows.append((d, top, math.nan))
            continue
        j = neg[-1]
        if j + 1 < len(lams):
            edge = bisect_root(lambda lam: mr.h1(d, lam, s), lams[j], lams[j + 1])
        else:
            edge = lams[j]
        rows.append((d, top, edge))
    p = mr.max_rate("lambda1", s)
    rows.append((p.delta, math.nan, p.lam))
    return cols, rows


def _rate_table(args, variants, attr):
    grid = _s_grid(args)
    curves = [mr.lambda_curve(v, grid) for v in variants]
    rows = [(s,) + tuple(getattr(c.points[j], attr) for c in curves) for j, s in enumerate(grid)]
    return rows


def _fig2(args):
    return ("s", "lambda0", "lambda1", "lambda2"), _rate_table(args, ("lambda0", "lambda1", "lambda2"), "lam")


def _fig3(args):
    return ("s", "delta0", "delta1", "delta2"), _rate_table(args, ("lambda0", "lambda1", "lambda2"), "delta")


def _fig4(args):
    return ("s", "lambda2", "lambda2_tilde"), _rate_table(args, ("lambda2", "lambda2_tilde"), "lam")


def _fig5(args):
    rows = _rate_table(args, ("lambda2", "lambda2_tilde"), "lam")
    return ("s", "scaled_gap"), [(s, (a - b) * (1.0 + s ** -2)) for s, a, b in rows]


def _fig6(args):
    times = (1.0, 5.0, 10.0)
    grid = np.linspace(0.0, 2.0, max(args.points, 2))
    cols = ("s",) + tuple(f"hplus_t{int(t)}" for t in times)
    vals = [gt_sim.propagator_norm_sq(grid, 1.0, t) for t in times]
    return cols, [(s,) + tuple(v[j] for v in vals) for j, s in enumerate(grid)]


def _fig7(args):
    grid = np.linspace(0.0, 2.0, max(args.points, 2))
    return ("s", "mu", "mu_tilde"), [(s, bounds.mu_line(s), bounds.mu_tilde(s)) for s in grid]


_FIGURE_FNS = dict(zip(FIGURES, (_fig1, _fig2, _fig3, _fig4, _fig5, _fig6, _fig7)))


def cmd_figure(args) -> int:
    fn = _FIGURE_FNS.get(args.name)
    if fn is None:
        raise ConfigError(f"unknown figure {args.name!r}; valid names: {', '.join(FIGURES)}")
    cols, rows = fn(args)
    _emit(_table(cols, rows, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common(p, s_grid=False, t_grid=False):
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    if s_grid:
        p.add_argument("--s-min", type=float, default=1e-3)
        p.add_argument("--s-max", type=float, default=1e4)
        p.add_argument("--points", type=int, default=400)
    if t_grid:
        p.add_argument("--t-min", type=float, default=1e-3)
        p.add_argument("--t-max", type=float, default=1e3)
        p.add_argument("--per-decade", type=int, default=gt_sim.PER_DECADE)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyporate", description="Hypocoercive decay rates and certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="modal rate curves lambda_i(s), delta_i(s)")
    _common(p, s_grid=True)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("certify", help="Lyapunov certificates for Goldstein-Taylor on the torus")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--xi-max", type=int, default=sl.DEFAULT_XI_MAX)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", help="simulate and check against the envelope")
    _common(p, t_grid=True)
    p.add_argument("--domain", choices=("torus", "line"), default="torus")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--preset", default=None, help="cosine, gaussian_modes, worst_case (torus); gaussian (line)")
    p.add_argument("--xi", type=int, default=1, help="mode of the worst_case preset")
    p.add_argument("--xi-max", type=int, default=gt_sim.TORUS_N, help="torus truncation N")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", help="whole-space decay envelopes")
    _common(p, t_grid=True)
    p.add_argument("--kind", default="gt_line")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--preset", default="gaussian")
    p.add_argument("--l1-sq", type=float, default=None)
    p.add_argument("--l2-sq", type=float, default=None)
    p.add_argument("--dim", type=int, default=1)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("figure", help="data tables for the figures")
    p.add_argument("name")
    _common(p, s_grid=True)
    p.set_defaults(func=cmd_figure)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except CertificateViolation as exc:
        sys.stderr.write(f"CertificateViolation: {exc}\n")
        return EXIT_CERT
    except HyporateError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
