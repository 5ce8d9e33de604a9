"""Delta-function identities as windowed, coefficient-exact checks."""

from __future__ import annotations

from gmpy2 import mpq

from .report import CheckReport
from .scalar import ONE, ZERO
from .series import (
    FormalSeries,
    Window,
    delta,
    delta3,
    delta_ratio,
    evaluate,
    mono_str,
    multiply,
    substitute_binomial,
)

KINDS = ("two_term", "three_term", "three_term_lhs_inequality", "substitution")


def x_inv_delta(out: str, first, second, den_sign: int = 1) -> FormalSeries:
    """out^-1 delta((first + second)/(den_sign*out)); first/second are terms."""
    den = out if den_sign == 1 else (-ONE, out)
    return multiply(FormalSeries.var(out, -1), delta_ratio([first, second], den))


def two_term_sides():
    lhs = x_inv_delta("x2", "x1", (-ONE, "x0"))
    rhs = x_inv_delta("x1", "x2", "x0")
    return lhs, rhs


def three_term_sides():
    t1 = delta3("x0", "x1", "x2", 1)
    t2 = delta3("x0", "x1", "x2", -1)
    rhs = x_inv_delta("x2", "x1", (-ONE, "x0"))
    return t1, t2, rhs


def _compare(report, name, lhs, rhs, window, inputs=None):
    a, b = lhs.coefficients(window), rhs.coefficients(window)
    for m in sorted(set(a) | set(b), key=lambda m: [(v, str(e)) for v, e in m]):
        if a.get(m, ZERO) != b.get(m, ZERO):
            return report.add(name, False, "coefficients differ",
                              {"inputs": inputs, "monomial": mono_str(m),
                               "lhs": a.get(m, ZERO), "rhs": b.get(m, ZERO)})
    return report.add(name, True, f"{len(a)} nonzero coefficients compared")


def verify_delta_identity(kind: str, window: Window, f: FormalSeries | None = None) -> CheckReport:
    report = CheckReport()
    if kind == "two_term":
        lhs, rhs = two_term_sides()
        _compare(report, kind, lhs, rhs, window)
    elif kind == "three_term":
        t1, t2, rhs = three_term_sides()
        _compare(report, kind, t1 - t2, rhs, window)
    elif kind == "three_term_lhs_inequality":
        t1, t2, _ = three_term_sides()
        m = t1.equal_on(t2, window)
        if m is None:
            report.add(kind, False, "the two left-hand terms agree on the window",
                       {"inputs": None, "monomial": None, "lhs": None, "rhs": None})
        else:
            report.add(kind, True, f"terms differ at {mono_str(m)}: "
                       f"{t1.coefficient(m)} vs {t2.coefficient(m)}")
    elif kind == "substitution":
        if f is None:
            f = FormalSeries.from_terms({(("x1", mpq(2)), ("y", mpq(1))): ONE,
                                         (("x1", mpq(-1)), ("x2", mpq(1))): mpq(3)})
        variables = set(f.variables)
        if variables <= {"x"}:
            d = delta("x")
            lhs = multiply(f, d)
            rhs = d.scale(evaluate(f, {"x": ONE}))
            _compare(report, kind, lhs, rhs, window, {"f": f.render()})
        else:
            d = x_inv_delta("x1", "x2", (-ONE, "y"))
            lhs = multiply(d, f)
            rhs = multiply(d, substitute_binomial(f, "x1", "x2", (-ONE, "y")))
            _compare(report, kind, lhs, rhs, window, {"f": f.render()})
    else:
        raise ValueError(f"unknown identity kind {kind!r}; expected one of {KINDS}")
    return report
