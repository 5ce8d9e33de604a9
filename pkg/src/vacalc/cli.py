"""The ``va`` command line tool.

Exit codes: 0 when every check passes, 1 when a check fails (the report
carries a witness), 2 for usage errors such as bad flags, unreadable files or
syntax errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import dsl
from .errors import InvariantViolation, VacalcError
from .report import REPORT_VERSION, CheckReport
from .scalar import fmt
from .series import Window, mono_str

DEFAULT_WINDOW = 8
DEFAULT_MAX_WT = 8


class UsageError(Exception):
    pass


def _seed() -> int:
    raw = os.environ.get("VA_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"VA_SEED must be an integer, got {raw!r}") from None


def _bounds(text: str | None):
    if text is None:
        return None
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--bounds expects r,s,t,deg, got {text!r}") from None
    if len(parts) != 4 or min(parts) < 0:
        raise UsageError(f"--bounds expects four nonnegative integers, got {text!r}")
    return parts


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def _emit_report(args, report: CheckReport, extra: dict | None = None) -> int:
    if args.report == "json":
        data = report.to_dict()
        if extra:
            data.update(extra)
        _emit(args, json.dumps(data, indent=2, sort_keys=True))
    else:
        text = report.render_text()
        if extra:
            text = "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in sorted(extra.items())) + "\n" + text
        _emit(args, text)
    return 0 if report.passed else 1


def _load(path):
    from .tables import ingest_table

    if not Path(path).exists():
        raise UsageError(f"no such file: {path}")
    return ingest_table(path)


def _load_or_report(path):
    """(structure, None), or (None, failing report) when a load-time invariant breaks."""
    try:
        return _load(path), None
    except InvariantViolation as exc:
        report = CheckReport()
        report.add(f"load.{exc.invariant}", False, str(exc), exc.witness or {"detail": str(exc)})
        return None, report


def _as_module(obj):
    from .algebra import VertexAlgebra
    from .modules import Module

    if isinstance(obj, Module):
        return obj
    if isinstance(obj, VertexAlgebra):
        return Module.adjoint(obj)
    raise UsageError("expected an algebra or module file")


def _window(args) -> Window:
    return Window.symmetric(args.window)


# ---------------------------------------------------------------- expand / res


def _series_listing(args, expr, value) -> int:
    window = _window(args)
    canonical = dsl.unparse(expr)
    if isinstance(value, dsl.VSeries):
        terms = [(mono_str(m), str(v)) for m, v in sorted(value.terms.items(), key=lambda kv: mono_str(kv[0]))
                 if window.contains(m)]
    else:
        terms = [(mono_str(m), fmt(c)) for m, c in value.coefficients(window).items()]
    if args.report == "json":
        _emit(args, json.dumps({"version": REPORT_VERSION, "expression": canonical, "window": args.window,
                                "terms": [{"monomial": m, "coeff": c} for m, c in terms]},
                               indent=2, sort_keys=True))
    else:
        lines = [f"{canonical}   (exponents in [-{args.window}, {args.window}])"]
        lines += [f"  {c:>12}  {m}" for m, c in terms] or ["  0"]
        _emit(args, "\n".join(lines))
    return 0


def _env(args) -> dsl.Env:
    structure = _as_module(_load(args.structure)) if args.structure else None
    return dsl.Env(structure, _window(args))


def cmd_expand(args) -> int:
    expr = dsl.parse_expr(args.expr)
    return _series_listing(args, expr, dsl.evaluate_expr(expr, _env(args)))


def cmd_res(args) -> int:
    expr = dsl.Res(args.var, dsl.parse_expr(args.expr))
    return _series_listing(args, expr, dsl.evaluate_expr(expr, _env(args)))


# ---------------------------------------------------------------- check


def check_structure(obj, *, window: Window, max_wt: int, seed: int = 0) -> CheckReport:
    """The full suite appropriate for a loaded structure."""
    from .algebra import VertexAlgebra, check_all
    from .duality import RationalFn
    from .modules import Module, check_module

    if isinstance(obj, VertexAlgebra):
        return check_all(obj, window, max_wt=max_wt)
    if isinstance(obj, Module):
        return check_module(obj, window, max_wt=max_wt)
    if isinstance(obj, tuple):
        return check_lie(*obj)
    if isinstance(obj, RationalFn):
        return check_ratfn(obj)
    raise UsageError(f"nothing to check for {type(obj).__name__}")


def check_lie(alg, reps, maps) -> CheckReport:
    """Representations were validated on load; each map is checked as an
    intertwining map modules[0] x modules[1] -> modules[2]."""
    from .lie import IntertwiningMapLie, check_intertwining

    report = CheckReport()
    report.add("algebra", True, f"{alg.name}: antisymmetric, Jacobi")
    for r in reps:
        report.add(f"rep.{r.name}", True, f"dimension {r.dim}, homomorphism")
    if maps and len(reps) < 3:
        raise UsageError("maps need three modules: sources W1, W2 and target W3")
    for k, M in enumerate(maps):
        W1, W2, W3 = reps[:3]
        if M.shape != (W3.dim, W1.dim * W2.dim):
            raise UsageError(f"map {k} has shape {M.shape}, expected {(W3.dim, W1.dim * W2.dim)}")
        I = IntertwiningMapLie(M, (W1, W2), W3, f"map{k}")
        report.extend(check_intertwining(I, W1, W2, W3), f"map{k}.")
    return report


def check_ratfn(F) -> CheckReport:
    from .duality import REGIONS, Region, fit_window, iota_expand, iota_expand_kernel, reconstruct_rational

    report = CheckReport()
    bounds = (F.r, F.s, F.t, F.g.degree())
    for tag in REGIONS:
        region = Region(tag)
        if region.variables != F.variables or region.sigma != F.sigma:
            continue
        window = fit_window(bounds, region)
        S = iota_expand(F, region, window)
        diff = S.equal_on(iota_expand_kernel(F, region), window)
        report.add(f"{tag}.routes", diff is None, "direct and kernel expansions agree",
                   {"monomial": str(diff)})
        G = reconstruct_rational(S, region, bounds, window)
        report.add(f"{tag}.roundtrip", G == F, f"reconstructed {G}", {"lhs": str(G), "rhs": str(F)})
    return report


def cmd_check(args) -> int:
    obj, failed = _load_or_report(args.file)
    if failed is not None:
        return _emit_report(args, failed)
    return _emit_report(args, check_structure(obj, window=_window(args), max_wt=args.max_wt, seed=_seed()))


# ---------------------------------------------------------------- contragredient


def cmd_contragredient(args) -> int:
    from .modules import check_contragredient, contragredient
    from .tables import dumps

    mod = _as_module(_load(args.file))
    if args.check:
        return _emit_report(args, check_contragredient(mod, _window(args), max_wt=args.max_wt))
    _emit(args, dumps(contragredient(mod, args.max_wt)))
    return 0


# ---------------------------------------------------------------- duality


def _vector_arg(text: str):
    from .grading import Vector

    if "'" not in text:
        return Vector.basis(text)
    value = dsl.evaluate_text(text)
    if not isinstance(value, dsl.VSeries) or set(value.terms) - {()}:
        raise UsageError(f"not a constant vector: {text}")
    return value.terms.get((), Vector())


def cmd_duality(args) -> int:
    from .duality import check_duality, check_Pz_from_module, check_roundtrip

    report = CheckReport()
    bounds = _bounds(args.bounds)
    if args.roundtrip:
        report.extend(check_roundtrip(args.roundtrip, bounds or (3, 3, 3, 4), _seed()), "reconstruction.")
    if args.file:
        mod = _as_module(_load(args.file))
        if args.args:
            vecs = [_vector_arg(a) for a in args.args]
            report.extend(check_duality(mod, *vecs, window=args.window, bounds=bounds or (3, 3, 3, 4)))
        for z in args.pz or ():
            report.extend(check_Pz_from_module(mod, dsl_scalar(z), window=args.window, max_wt=args.max_wt),
                          f"P({z}).")
    elif args.args or args.pz:
        raise UsageError("--args and --pz need a module file")
    if not report.results:
        raise UsageError("nothing to do: give a module with --args or --pz, or --roundtrip K")
    return _emit_report(args, report)


def dsl_scalar(text: str):
    from .scalar import parse_scalar

    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a scalar: {text!r}") from None


# ---------------------------------------------------------------- lie


def cmd_lie(args) -> int:
    from . import lie
    from .tables import export

    obj = _load(args.file)
    if not isinstance(obj, tuple):
        raise UsageError("expected a Lie algebra file")
    alg, reps, maps = obj
    report = CheckReport()
    extra = {}
    if args.action == "check":
        return _emit_report(args, check_lie(alg, reps, maps))
    if not reps:
        raise UsageError("the file declares no modules")
    if args.action == "tensor":
        W1, W2 = (reps[0], reps[1]) if len(reps) > 1 else (reps[0], reps[0])
        T = lie.tensor_rep(W1, W2)
        report.add("tensor.homomorphism", _is_rep(T), f"{W1.name} (x) {W2.name} is a representation")
        extra["spins"] = {fmt(j): m for j, m in sorted(lie.spins(T).items())}
        extra["tensor"] = T.to_json()
    elif args.action == "assoc":
        W1, W2, W3 = (reps * 3)[:3]
        report.extend(lie.check_road_map(W1, W2, W3), "road_map.")
        iso = lie.associativity_iso(W1, W2, W3)
        report.extend(lie.check_associativity_iso(iso, W1, W2, W3), "associativity.")
        report.extend(lie.check_coherence(W1, W2, W3, (reps * 4)[3]), "coherence.")
    elif args.action == "contragredient":
        duals = [lie.contragredient_rep(W) for W in reps]
        for k, (W, D) in enumerate(zip(reps, duals)):
            back = lie.contragredient_rep(D)
            same = all((a == b).all() for a, b in zip(back.matrices, W.matrices))
            report.add(f"W{k + 1}.double_dual", same, "(W')' == W on action matrices")
            report.add(f"W{k + 1}.dual_is_rep", _is_rep(D), "W' is a representation")
        extra["contragredient"] = export((alg, duals, []))
    return _emit_report(args, report, extra)


def _is_rep(rep) -> bool:
    try:
        rep.validate()
        return True
    except VacalcError:
        return False


# ---------------------------------------------------------------- ingest


def cmd_ingest(args) -> int:
    from .tables import dumps

    if args.check:
        return cmd_check(args)
    obj = _load(args.file)
    _emit(args, dumps(obj))
    return 0


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", type=int, default=DEFAULT_WINDOW, help="exponent bound (default 8)")
    common.add_argument("--max-wt", type=int, default=DEFAULT_MAX_WT, help="weight bound (default 8)")
    common.add_argument("--report", choices=("json", "text"), default="text")
    common.add_argument("--out", help="write output to FILE")

    p = argparse.ArgumentParser(prog="va", description="Exact formal calculus for vertex algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("expand", parents=[common], help="expand an expression on a window")
    s.add_argument("expr")
    s.add_argument("--structure", help="algebra or module file for Y/Yo nodes")
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("res", parents=[common], help="residue of an expression in one variable")
    s.add_argument("expr")
    s.add_argument("--var", required=True)
    s.add_argument("--structure", help="algebra or module file for Y/Yo nodes")
    s.set_defaults(func=cmd_res)

    s = sub.add_parser("check", parents=[common], help="run the check suite for a file")
    s.add_argument("file")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("contragredient", parents=[common], help="build (or --check) the contragredient")
    s.add_argument("file")
    s.add_argument("--check", action="store_true")
    s.set_defaults(func=cmd_contragredient)

    s = sub.add_parser("duality", parents=[common], help="rationality, commutativity and associativity")
    s.add_argument("file", nargs="?")
    s.add_argument("--args", nargs=4, metavar=("V'", "V1", "V2", "V"))
    s.add_argument("--bounds", help="r,s,t,deg (default 3,3,3,4)")
    s.add_argument("--pz", action="append", metavar="Z", help="also check the P(z) identity at Z")
    s.add_argument("--roundtrip", type=int, metavar="K", help="reconstruct K random rational functions")
    s.set_defaults(func=cmd_duality)

    s = sub.add_parser("lie", parents=[common], help="finite-dimensional Lie representation tools")
    s.add_argument("action", choices=("tensor", "assoc", "contragredient", "check"))
    s.add_argument("file")
    s.set_defaults(func=cmd_lie)

    s = sub.add_parser("ingest", parents=[common], help="validate a table and print its canonical JSON")
    s.add_argument("file")
    s.add_argument("--check", action="store_true", help="also run the check suite")
    s.set_defaults(func=cmd_ingest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"va: {exc}", file=sys.stderr)
        return 2
    except dsl.ExprSyntaxError as exc:
        print(f"va: syntax error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"va: {exc}", file=sys.stderr)
        return 1
    except (VacalcError, ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"va: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
