"""Command-line front end.

    gmtransform transform -f "exp(-x)" --rho 1 --m 1 --u 1 --v 0 --omega 1
    gmtransform transform --kind laplace -f 1 --u 4
    gmtransform verify [--only scaling,table1] [--tol 1e-8] [-o report.json]
    gmtransform invert --image "1/(x+1)" --t 1
    gmtransform invert --kind m --image "..." --x 1 --rho 1 --v 1 --omega 2
    gmtransform solve-transport --r-time "exp(-x)" --rho 1 --v 0.5 --with-oracle
    gmtransform solve-heat --r-space "sin(3*x)" --r-time "exp(-x)" --rho 1 --v 0.25

Functions are expressions in ``x`` (see ``gmtransform.funcdsl``).  Source
terms of the two PDE examples are products ``r_time(t) * r_space(x)``, each
written in the single variable ``x``.  Complex values are given as ``re,im``.

Exit codes: 0 success, 1 failed identity, 2 usage or parse error,
3 domain error, 4 non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import mtransform as mt
from .errors import DomainError, ExprSyntaxError, GMTransformError, QuadratureError
from .funcdsl import compile_expr, parse, to_handle
from .laplace_inv import BROMWICH, InversionConfig, inverse_laplace, inverse_natural, m_inverse
from .mtransform import GrowthBound, MParams
from .pde import (HeatProblem, TransportProblem, build_heat_series, heat_fd_oracle,
                  solve_heat_series, transport_char_oracle, solve_transport)
from .report import reports_to_json
from .suite import GROUPS, run_suite

EXIT_FAIL, EXIT_USAGE, EXIT_DOMAIN, EXIT_NONCONV = 1, 2, 3, 4
KINDS = ("m", "laplace", "natural", "sumudu", "stieltjes", "mellin", "borel")


class UsageError(Exception):
    pass


def complex_arg(text: str) -> complex:
    """``"1.5"`` or ``"1.5,-2"`` (real, imaginary)."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]))
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're' or 're,im', got {text!r}")


def float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in str(text).split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _plain(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else z


def _add_params(sp, u_default=None):
    g = sp.add_argument_group("transform parameters")
    g.add_argument("--rho", type=complex_arg, default=0j)
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--u", type=complex_arg, default=u_default)
    g.add_argument("--v", type=complex_arg, default=0j)
    g.add_argument("--omega", type=float, default=1.0)


def _add_output(sp, default_format):
    sp.add_argument("-o", "--output", help="write to this path instead of stdout")
    sp.add_argument("--format", choices=("csv", "json"), default=default_format)


def _add_growth(sp):
    g = sp.add_argument_group("growth certificate |f| <= K x^power exp(x/beta), x > T")
    g.add_argument("--growth-K", type=float)
    g.add_argument("--growth-beta", type=float)
    g.add_argument("--growth-T", type=float)
    g.add_argument("--growth-power", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gmtransform",
        description="Generalized M-transform: evaluate transforms, check identities, invert images "
                    "and solve the transport and heat examples.",
        epilog="Exit codes: 0 ok, 1 failed identity, 2 usage or parse error, 3 domain error, "
               "4 no convergence.")
    ap.add_argument("--config", help="JSON file whose keys match the long flag names")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("transform", help="M-transform or a classical special case")
    sp.add_argument("-f", "--function", required=True, help="expression in x")
    sp.add_argument("--kind", choices=KINDS, default="m")
    _add_params(sp)
    sp.add_argument("--z", type=complex_arg, help="Mellin argument")
    sp.add_argument("--s", type=complex_arg, help="Borel argument")
    sp.add_argument("--nu", type=float, default=1.0)
    sp.add_argument("--mu", type=float, default=1.0)
    sp.add_argument("--rel-tol", type=float, default=1e-10)
    sp.add_argument("--abs-tol", type=float, default=1e-12)
    _add_growth(sp)
    _add_output(sp, "json")

    sp = sub.add_parser("verify", help="run the identity suite")
    sp.add_argument("--only", help="comma-separated groups: " + ",".join(GROUPS))
    sp.add_argument("--tol", type=float, help="override every tolerance")
    _add_output(sp, "json")

    sp = sub.add_parser("invert", help="numerical inverse Laplace / natural / M-transform")
    sp.add_argument("--image", required=True, help="image as an expression in x (the transform variable)")
    sp.add_argument("--kind", choices=("laplace", "natural", "m"), default="laplace")
    sp.add_argument("--t", type=float, help="time for laplace/natural inversion")
    sp.add_argument("--x", type=float, help="point for m inversion")
    sp.add_argument("--method", choices=("talbot_fixed", "bromwich_trapezoid"))
    sp.add_argument("--n-nodes", type=int, default=48)
    sp.add_argument("--alpha", type=float, default=1.0, help="Bromwich abscissa lower bound")
    sp.add_argument("--check", action="store_true", help="also report both methods")
    _add_params(sp, u_default=None)
    _add_output(sp, "json")

    sp = sub.add_parser("solve-transport", help="first-order transport IBVP")
    sp.add_argument("--r-time", default="0", help="time factor of the source, in x")
    sp.add_argument("--r-space", default="1", help="space factor of the source, in x")
    sp.add_argument("--phi-omega", type=complex_arg, default=0j, help="initial value w phi(w)")
    _add_params(sp)
    sp.add_argument("--t-grid", type=float_list, default=[0.5, 1.0, 1.5, 2.0])
    sp.add_argument("--x-grid", type=float_list, default=[0.25, 0.75, 1.25, 1.75])
    sp.add_argument("--with-oracle", action="store_true")
    sp.add_argument("--dt", type=float, default=1e-3, help="oracle step")
    _add_output(sp, "csv")

    sp = sub.add_parser("solve-heat", help="heat equation with sources on (0, pi)")
    sp.add_argument("--f-init", default="0", help="initial profile, in x")
    sp.add_argument("--r-time", default="0", help="time factor of the source, in x")
    sp.add_argument("--r-space", default="0", help="space factor of the source, in x")
    sp.add_argument("--rho", type=complex_arg, default=0j)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--v", type=complex_arg, default=0j)
    sp.add_argument("--K-max", type=int, default=40)
    sp.add_argument("--sign", choices=("corrected", "alternating"), default="corrected")
    sp.add_argument("--t-grid", type=float_list, default=[0.1, 0.325, 0.55, 0.775, 1.0])
    sp.add_argument("--x-grid", type=float_list,
                    default=[math.pi / 8, math.pi / 4, math.pi / 2, 3 * math.pi / 4, 7 * math.pi / 8])
    sp.add_argument("--with-oracle", action="store_true")
    sp.add_argument("--nx", type=int, default=400)
    sp.add_argument("--nt", type=int, default=400)
    _add_output(sp, "csv")
    return ap


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _emit(text: str, args):
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _expr_fn(src: str):
    fn = compile_expr(parse(src))

    def wrapped(x):
        with np.errstate(over="ignore", under="ignore"):
            return fn(x)
    return wrapped


def _growth(args) -> GrowthBound | None:
    vals = {k: getattr(args, "growth_" + k) for k in ("K", "beta", "T", "power")}
    if all(v is None for v in vals.values()):
        return None
    base = GrowthBound()
    return GrowthBound(**{k: (getattr(base, k) if v is None else v) for k, v in vals.items()})


def _params(args) -> MParams:
    return MParams(rho=_plain(args.rho), m=args.m, u=_plain(args.u if args.u is not None else 1),
                   v=_plain(args.v), omega=args.omega)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s): "
                         + ", ".join("--" + n.replace("_", "-") for n in missing))


def _number_record(value) -> dict:
    z = complex(value)
    return {"re": z.real, "im": z.imag}


def _rows_text(header, rows, fmt):
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for r in rows:
        wr.writerow([repr(c) if isinstance(c, float) else c for c in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_transform(args) -> int:
    f = to_handle(args.function, _growth(args))
    cfg = mt.QuadConfig(rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    kind = args.kind
    if kind in ("m", "laplace", "natural"):
        _need(args, "u")
    if kind == "m":
        res = mt.m_transform(f, _params(args), cfg)
    elif kind == "laplace":
        res = mt.laplace(f, _plain(args.u), cfg)
    elif kind == "natural":
        res = mt.natural(f, _plain(args.u), args.omega, cfg)
    elif kind == "sumudu":
        res = mt.sumudu(f, args.omega, cfg)
    elif kind == "stieltjes":
        res = mt.stieltjes(f, _plain(args.rho), args.omega, cfg)
    elif kind == "mellin":
        _need(args, "z")
        res = mt.mellin(f, _plain(args.z), cfg)
    else:
        _need(args, "s")
        res = mt.borel_dzrbashjan(f, _plain(args.s), args.nu, args.mu, cfg)
    z = complex(res.value)
    rec = {"kind": kind, "function": args.function, "value_re": z.real, "value_im": z.imag,
           "abs_err_est": float(res.abs_err_est), "n_evals": int(res.n_evals),
           "converged": bool(res.converged)}
    if args.format == "json":
        _emit(json.dumps(rec, indent=2) + "\n", args)
    else:
        _emit(_rows_text(list(rec), [list(rec.values())], "csv"), args)
    return 0


def cmd_verify(args) -> int:
    only = [s.strip() for s in args.only.split(",")] if args.only else None
    if only:
        unknown = [s for s in only if s not in GROUPS]
        if unknown:
            raise UsageError(f"verify: unknown group(s) {', '.join(unknown)}; "
                             f"choose from {', '.join(GROUPS)}")
    reports = run_suite(only, args.tol)
    if args.format == "json":
        _emit(reports_to_json(reports) + "\n", args)
    else:
        header = list(reports[0].to_dict()) if reports else []
        _emit(_rows_text(header, [list(r.to_dict().values()) for r in reports], "csv"), args)
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} identities passed", file=sys.stderr)
    for r in failed:
        print(str(r), file=sys.stderr)
    return EXIT_FAIL if failed else 0


def cmd_invert(args) -> int:
    img = _expr_fn(args.image)
    kind = args.kind
    default = BROMWICH.method if kind == "m" else "talbot_fixed"
    inv = InversionConfig(method=args.method or default, n_nodes=args.n_nodes,
                          bromwich_alpha=args.alpha)
    rec = {"kind": kind, "image": args.image, "method": inv.method}
    if kind == "m":
        _need(args, "x")
        val = m_inverse(img, args.x, _params(args), inv)
        rec["x"] = args.x
    else:
        _need(args, "t")
        if kind == "natural":
            val = inverse_natural(img, args.t, args.omega, inv)
        else:
            val = inverse_laplace(img, args.t, inv)
        rec["t"] = args.t
    z = complex(val)
    rec.update(value_re=z.real, value_im=z.imag)
    if args.check and kind != "m":
        other = "bromwich_trapezoid" if inv.method == "talbot_fixed" else "talbot_fixed"
        cfg2 = InversionConfig(method=other, n_nodes=args.n_nodes, bromwich_alpha=args.alpha)
        fn = (lambda F, t, c: inverse_natural(F, t, args.omega, c)) if kind == "natural" \
            else inverse_laplace
        w = complex(fn(img, args.t, cfg2))
        rec.update(other_method=other, other_re=w.real, other_im=w.imag,
                   rel_diff=abs(w - z) / max(abs(w), abs(z), 1e-300))
    if args.format == "json":
        _emit(json.dumps(rec, indent=2) + "\n", args)
    else:
        _emit(_rows_text(list(rec), [list(rec.values())], "csv"), args)
    return 0


def _separable(r_time: str, r_space: str, time_first: bool):
    ft, fx = _expr_fn(r_time), _expr_fn(r_space)
    if time_first:
        return lambda t, x: ft(t) * fx(x)
    return lambda x, t: fx(x) * ft(t)


def _is_zero(src: str) -> bool:
    try:
        e = parse(src)
    except ExprSyntaxError:
        return False
    return getattr(e, "value", None) == 0.0


def _summary(diffs, label):
    if diffs:
        print(f"max |{label} - oracle| = {max(diffs):.3e} over {len(diffs)} points",
              file=sys.stderr)


def cmd_solve_transport(args) -> int:
    p = MParams(rho=_plain(args.rho), m=args.m, v=_plain(args.v), omega=args.omega)
    zero = _is_zero(args.r_time) or _is_zero(args.r_space)
    r = None if zero else _separable(args.r_time, args.r_space, True)
    prob = TransportProblem(r, _plain(args.phi_omega), p,
                            x_max=max(args.x_grid), t_max=max(args.t_grid))
    header = ["t", "x", "re(w)", "im(w)", "method", "err_flag"]
    if args.with_oracle:
        header += ["oracle_re", "oracle_im", "abs_diff"]
    rows, diffs = [], []
    for t in args.t_grid:
        for x in args.x_grid:
            w = complex(solve_transport(prob, t, x))
            flag = int(abs(t - x) < 0.05)
            row = [float(t), float(x), w.real, w.imag, "transform", flag]
            if args.with_oracle:
                o = complex(transport_char_oracle(prob, t, x, args.dt))
                row += [o.real, o.imag, abs(w - o)]
                if not flag:
                    diffs.append(abs(w - o))
            rows.append(row)
    _emit(_rows_text(header, rows, args.format), args)
    _summary(diffs, "transform")
    return 0


def cmd_solve_heat(args) -> int:
    f0 = None if _is_zero(args.f_init) else _expr_fn(args.f_init)
    zero = _is_zero(args.r_time) or _is_zero(args.r_space)
    r = None if zero else _separable(args.r_time, args.r_space, False)
    prob = HeatProblem(f0, r, rho=_plain(args.rho), m=args.m, v=_plain(args.v),
                       K_max=args.K_max, t_grid=tuple(args.t_grid), x_grid=tuple(args.x_grid))
    sol = build_heat_series(prob, sign=args.sign)
    grid = heat_fd_oracle(prob, args.nx, args.nt) if args.with_oracle else None
    header = ["t", "x", "re(w)", "im(w)", "method", "err_flag"]
    if args.with_oracle:
        header += ["oracle_re", "oracle_im", "abs_diff"]
    rows, diffs = [], []
    for t in args.t_grid:
        for x in args.x_grid:
            phi = complex(solve_heat_series(prob, x, t, sign=args.sign, solution=sol))
            flag = int(sol.tail_bound[float(t)] > 1e-6)
            row = [float(t), float(x), phi.real, phi.imag, f"series_{args.sign}", flag]
            if grid is not None:
                o = complex(grid.at(x, t))
                row += [o.real, o.imag, abs(phi - o)]
                diffs.append(abs(phi - o))
            rows.append(row)
    _emit(_rows_text(header, rows, args.format), args)
    _summary(diffs, "series")
    return 0


COMMANDS = {
    "transform": cmd_transform,
    "verify": cmd_verify,
    "invert": cmd_invert,
    "solve-transport": cmd_solve_transport,
    "solve-heat": cmd_solve_heat,
}


def _apply_config(ap: argparse.ArgumentParser, argv: Sequence[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        with open(known.config) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        ap.error(f"cannot read config {known.config}: {exc}")
    if not isinstance(data, dict):
        ap.error("config must be a JSON object")
    defaults = {}
    for key, val in data.items():
        key = key.replace("-", "_")
        if key in ("rho", "u", "v", "phi_omega", "z", "s") and not isinstance(val, (int, float)):
            val = complex_arg(val if isinstance(val, str) else ",".join(map(str, val)))
        elif key in ("t_grid", "x_grid") and isinstance(val, str):
            val = float_list(val)
        defaults[key] = val
    for action in ap._subparsers._group_actions:
        for sp in action.choices.values():
            sp.set_defaults(**defaults)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        _apply_config(ap, argv)
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ExprSyntaxError) as exc:
        print(f"gmtransform: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"gmtransform: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except QuadratureError as exc:
        print(f"gmtransform: no convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except GMTransformError as exc:
        print(f"gmtransform: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"gmtransform: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
