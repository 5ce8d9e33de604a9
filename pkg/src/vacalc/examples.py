"""Concrete vertex algebras and modules.

* commutative algebras with a derivation, Y(a,x)b = (e^{xD}a)b;
* C[t] with D = -d/dt (Mobius, graded by nonpositive integers) and the
  lower-bounded variant D = t^2 d/dt with sl(2) = (t^2 d/dt, t d/dt, d/dt);
* the two-dimensional algebra C1 + Ca with a^2 = 0, D a = a;
* the trivial algebra C1 and a degenerate conformal fixture (D = 0, omega = 0);
* a module over C1 whose lowest L(0)-cell is a 2x2 Jordan block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from .algebra import GeneratedModes, Operator, TableModes, VertexAlgebra, sl2_bracket_check
from .errors import NotFiniteDimensional, SpecInvalid
from .grading import (
    UNBOUNDED_BELOW,
    ZERO_VECTOR,
    BasisVector,
    CellGenerator,
    Space,
    Vector,
    vector_from_json,
    vector_to_json,
    vsum,
    weight_class,
)
from .linalg import SparseSystem
from .modules import Module
from .report import CheckReport
from .scalar import ONE, ZERO, factorial, fmt, from_json, re_part, to_json

# ---------------------------------------------------------------- C[t]


def t_id(k: int) -> str:
    return "1" if k == 0 else "t" if k == 1 else f"t^{k}"


def t_exp(bid: str) -> int:
    if bid == "1":
        return 0
    if bid == "t":
        return 1
    if bid.startswith("t^"):
        try:
            k = int(bid[2:])
        except ValueError:
            k = -1
        if k >= 2:
            return k
    raise KeyError(f"unknown basis id {bid!r}")


class PolyCells(CellGenerator):
    """Basis t^k of C[t] with wt t^k = sign * k, one vector per cell."""

    def __init__(self, sign: int):
        self.sign = sign
        self.preset = {"cells": "polynomial", "sign": sign}

    def lookup(self, bid):
        k = t_exp(bid)
        return BasisVector(bid, (), mpq(self.sign * k))

    def cell(self, degree, weight):
        if degree != () or re_part(weight) != weight or mpq(weight).denominator != 1:
            return ()
        k = int(weight) * self.sign
        return (self.lookup(t_id(k)),) if k >= 0 else ()

    def cells(self, lo, hi):
        ks = [k for k in range(0, int(max(abs(lo), abs(hi))) + 1) if lo <= self.sign * k <= hi]
        return [((), mpq(self.sign * k)) for k in ks]

    def column_min(self, degree, weight):
        if degree != () or weight_class(weight) != (ZERO, ZERO):
            return None
        return ZERO if self.sign > 0 else UNBOUNDED_BELOW


@dataclass(frozen=True)
class CommAlgSpec:
    """A commutative associative unital algebra with a derivation D.

    Finite data: ``basis`` ids, ``mul[(a, b)]`` and ``D[a]`` as Vectors (absent
    means zero).  For C[t] use ``CommAlgSpec.polynomial``.
    """

    basis: tuple = ()
    unit: str = "1"
    mul: dict = field(default_factory=dict)
    D: dict = field(default_factory=dict)
    weights: dict | None = None
    polynomial_derivation: str | None = None

    @classmethod
    def polynomial(cls, derivation: str = "-d/dt"):
        if derivation not in POLY_DERIVATIONS:
            raise SpecInvalid(f"unknown derivation {derivation!r}; known: {sorted(POLY_DERIVATIONS)}")
        return cls(unit="1", polynomial_derivation=derivation)

    def product(self, a: str, b: str) -> Vector:
        return self.mul.get((a, b), ZERO_VECTOR)

    def to_json(self) -> dict:
        if self.polynomial_derivation is not None:
            return {"derivation": self.polynomial_derivation}
        out = {"basis": list(self.basis), "unit": self.unit,
               "mul": [[a, b, vector_to_json(v)] for (a, b), v in sorted(self.mul.items()) if v.c],
               "D": [[a, vector_to_json(v)] for a, v in sorted(self.D.items()) if v.c]}
        if self.weights is not None:
            out["weights"] = {b: to_json(w) for b, w in sorted(self.weights.items())}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CommAlgSpec":
        if "derivation" in data:
            return cls.polynomial(data["derivation"])
        weights = data.get("weights")
        return cls(tuple(data["basis"]), data.get("unit", "1"),
                   {(a, b): vector_from_json(v) for a, b, v in data.get("mul", [])},
                   {a: vector_from_json(v) for a, v in data.get("D", [])},
                   {b: from_json(w) for b, w in weights.items()} if weights is not None else None)

    def times(self, x: Vector, y: Vector) -> Vector:
        return vsum(self.product(a, b) * (ca * cb) for a, ca in x.c.items() for b, cb in y.c.items())

    def derive(self, x: Vector) -> Vector:
        return vsum(self.D.get(a, ZERO_VECTOR) * c for a, c in x.c.items())

    def validate(self):
        if self.polynomial_derivation is not None:
            return
        ids = list(self.basis)
        if self.unit not in ids:
            raise SpecInvalid("unit is not a basis vector")
        known = set(ids)
        for (a, b), v in self.mul.items():
            if a not in known or b not in known or not set(v.c) <= known:
                raise SpecInvalid(f"multiplication entry ({a}, {b}) uses unknown ids")
        for a, v in self.D.items():
            if a not in known or not set(v.c) <= known:
                raise SpecInvalid(f"derivation entry {a} uses unknown ids")
        B = {b: Vector.basis(b) for b in ids}
        for a in ids:
            if self.product(self.unit, a) != B[a] or self.product(a, self.unit) != B[a]:
                raise SpecInvalid(f"unit law fails at {a}")
            for b in ids:
                if self.product(a, b) != self.product(b, a):
                    raise SpecInvalid(f"not commutative: {a}{b} != {b}{a}")
                lhs = self.derive(self.product(a, b))
                rhs = self.times(self.derive(B[a]), B[b]) + self.times(B[a], self.derive(B[b]))
                if lhs != rhs:
                    raise SpecInvalid(f"Leibniz rule fails at ({a}, {b})")
                for c in ids:
                    if self.times(self.product(a, b), B[c]) != self.times(B[a], self.product(b, c)):
                        raise SpecInvalid(f"not associative at ({a}, {b}, {c})")


# D t^k = coeff(k) t^(k + shift)
POLY_DERIVATIONS = {
    "-d/dt": (lambda k: mpq(-k), -1),
    "t^2d/dt": (lambda k: mpq(k), 1),
    "0": (lambda k: ZERO, 0),
}

# (L(-1), L(0), L(1)) as (coeff, shift) pairs, and the weight sign
POLY_SL2 = {
    "-d/dt": ({-1: (lambda k: mpq(-k), -1), 0: (lambda k: mpq(-k), 0), 1: (lambda k: mpq(-k), 1)}, -1),
    "t^2d/dt": ({-1: (lambda k: mpq(k), 1), 0: (lambda k: mpq(k), 0), 1: (lambda k: mpq(k), -1)}, 1),
}


def _poly_operator(coeff, shift) -> Operator:
    def fn(bid):
        k = t_exp(bid)
        c = coeff(k)
        if c == 0 or k + shift < 0:
            return ZERO_VECTOR
        return Vector.basis(t_id(k + shift), c)

    return Operator(fn)


def _poly_va(derivation: str, name: str) -> VertexAlgebra:
    coeff, shift = POLY_DERIVATIONS[derivation]

    @lru_cache(maxsize=None)
    def d_power(k, m):
        """D^m t^k / m! as (coefficient, exponent)."""
        if m < 0:
            return ZERO, 0
        c = ONE
        for i in range(m):
            c *= coeff(k + i * shift)
            if c == 0:
                return ZERO, 0
        e = k + m * shift
        if e < 0:
            return ZERO, 0
        return c / factorial(m), e

    def mode(u, n, v):
        m = -1 - n
        c, e = d_power(t_exp(u), m)
        if c == 0:
            return ZERO_VECTOR
        return Vector.basis(t_id(e + t_exp(v)), c)

    def trunc(u, v):
        t_exp(u), t_exp(v)
        return -1

    if derivation in POLY_SL2:
        ops, sign = POLY_SL2[derivation]
        sl2 = {j: _poly_operator(*ops[j]) for j in (-1, 0, 1)}
        kind = "mobius"
    else:
        sign, sl2, kind = 1, None, "plain"
    space = Space(0, generator=PolyCells(sign), lower_bounded=sign > 0)
    preset = {"preset": "polynomial", "params": {"derivation": derivation}}
    return VertexAlgebra(space, GeneratedModes(mode, trunc), Vector.basis("1"), kind, sl2, name=name, preset=preset)


def _finite_comm_va(spec: CommAlgSpec, name: str, kind: str, sl2=None, omega=None) -> VertexAlgebra:
    ids = list(spec.basis)
    weights = spec.weights or {b: ZERO for b in ids}
    space = Space(0, [BasisVector(b, (), mpq(weights[b])) for b in ids])
    known = set(ids)

    @lru_cache(maxsize=None)
    def d_power(a, m):
        if m < 0:
            return ZERO_VECTOR
        x = Vector.basis(a)
        for i in range(m):
            x = spec.derive(x)
            if x.is_zero():
                return ZERO_VECTOR
        return x * (ONE / factorial(m))

    def mode(u, n, v):
        if u not in known or v not in known:
            raise KeyError(f"unknown basis id {u if u not in known else v!r}")
        return spec.times(d_power(u, -1 - n), Vector.basis(v))

    def trunc(u, v):
        if u not in known or v not in known:
            from .errors import MissingTableEntry

            raise MissingTableEntry(f"no entry for ({u}, {v})")
        return -1

    return VertexAlgebra(space, GeneratedModes(mode, trunc), Vector.basis(spec.unit), kind, sl2, omega,
                         name=name)


def build_comm_alg_va(spec: CommAlgSpec, name: str = "") -> VertexAlgebra:
    """Vertex algebra with a_{-1-m} b = (D^m a / m!) b and a_n b = 0 for n >= 0."""
    spec.validate()
    if spec.polynomial_derivation is not None:
        return _poly_va(spec.polynomial_derivation, name or f"C[t], D={spec.polynomial_derivation}")
    alg = _finite_comm_va(spec, name, "plain")
    alg.preset = {"preset": "comm_alg", "params": spec.to_json()}
    return alg


def build_poly_minus_d() -> VertexAlgebra:
    return build_comm_alg_va(CommAlgSpec.polynomial("-d/dt"), "C[t], D=-d/dt")


def build_poly_mobius_lb() -> VertexAlgebra:
    return build_comm_alg_va(CommAlgSpec.polynomial("t^2d/dt"), "C[t], D=t^2 d/dt")


def two_dim_spec() -> CommAlgSpec:
    one, a = Vector.basis("1"), Vector.basis("a")
    return CommAlgSpec(("1", "a"), "1", {("1", "1"): one, ("1", "a"): a, ("a", "1"): a}, {"a": a})


def build_two_dim() -> VertexAlgebra:
    return build_comm_alg_va(two_dim_spec(), "C1+Ca, a^2=0, Da=a")


def _trivial_space():
    return Space(0, [BasisVector("1", (), ZERO)])


def build_trivial(kind: str = "mobius") -> VertexAlgebra:
    """V = C1 with every L(j) zero (or omega = 0 in the conformal case)."""
    modes = TableModes({("1", "1", -1): Vector.basis("1")}, lambda b: b == "1", lambda b: b == "1")
    zero = {j: Operator(lambda b: ZERO_VECTOR) for j in (-1, 0, 1)}
    if kind == "conformal":
        return VertexAlgebra(_trivial_space(), modes, Vector.basis("1"), "conformal", omega=ZERO_VECTOR,
                             name="trivial", preset={"preset": "trivial", "params": {"kind": kind}})
    return VertexAlgebra(_trivial_space(), modes, Vector.basis("1"), kind, zero if kind == "mobius" else None,
                         name="trivial", preset={"preset": "trivial", "params": {"kind": kind}})


def dual_numbers_spec() -> CommAlgSpec:
    one, e = Vector.basis("1"), Vector.basis("e")
    return CommAlgSpec(("1", "e"), "1", {("1", "1"): one, ("1", "e"): e, ("e", "1"): e})


def build_conformal_fixture() -> VertexAlgebra:
    """C[e]/e^2 with D = 0, omega = 0, c = 0: a (degenerate) conformal vertex algebra."""
    spec = dual_numbers_spec()
    spec.validate()
    alg = _finite_comm_va(spec, "C[e]/e^2, D=0", "conformal", omega=ZERO_VECTOR)
    alg.preset = {"preset": "dual_numbers_conformal", "params": {}}
    return alg


def conformal_vector_search(alg: VertexAlgebra) -> CheckReport:
    """For a commutative-algebra vertex algebra every u_n with n >= 0 is zero,
    so omega_0 = 0, while L(-1) = omega_0 must equal D; a basis vector with
    D a != 0 therefore rules out any conformal vector."""
    report = CheckReport()
    basis = alg.space.all_basis(-8, 8) if not alg.space.finite else alg.space.all_basis()
    for b in basis:
        d = alg.modes.mode(b.id, -2, alg.vacuum.support()[0])
        if d.c:
            report.add("conformal_vector_impossible", True,
                       f"D {b.id} = {d} but omega_0 {b.id} = 0 for every omega")
            return report
    report.add("conformal_vector_impossible", False, "D = 0, so the obstruction does not apply",
               {"detail": "D vanishes on the basis"})
    return report


# ---------------------------------------------------------------- Jordan toy


def jordan_id(k: int, i: int) -> str:
    return f"w{k}_{i}"


def _parse_jordan(bid: str):
    if not bid.startswith("w") or "_" not in bid:
        raise KeyError(f"unknown basis id {bid!r}")
    k, i = bid[1:].split("_", 1)
    k, i = int(k), int(i)
    if k < 0 or i not in (0, 1):
        raise KeyError(f"unknown basis id {bid!r}")
    return k, i


class JordanCells(CellGenerator):
    def __init__(self, n):
        self.n = mpq(n)
        self.preset = {"cells": "jordan", "n": n}

    def lookup(self, bid):
        k, i = _parse_jordan(bid)
        return BasisVector(bid, (), self.n + k, i)

    def cell(self, degree, weight):
        k = weight - self.n
        if degree != () or k != int(k) or k < 0:
            return ()
        return tuple(self.lookup(jordan_id(int(k), i)) for i in (0, 1))

    def cells(self, lo, hi):
        return [((), self.n + k) for k in range(0, int(hi - self.n) + 2) if lo <= self.n + k <= hi]

    def column_min(self, degree, weight):
        if degree != () or weight_class(weight) != weight_class(self.n):
            return None
        return self.n


def build_jordan_toy(n=0, corrupt: bool = False) -> Module:
    """Generalized module over C1 induced from a 2x2 Jordan block of weight n.

    b_{k,i} = L(-1)^k b_{0,i}; L(0) = n + k + N with N b_{k,1} = b_{k,0}.
    ``corrupt`` scales N by k+1, which breaks [L(0)_s, L(-1)] = [L(0), L(-1)].
    """
    n = mpq(n)
    alg = build_trivial()
    space = Space(0, generator=JordanCells(n), generalized=True, lower_bounded=True)

    def scale(k):
        return mpq(k + 1) if corrupt else ONE

    def lm1(bid):
        k, i = _parse_jordan(bid)
        return Vector.basis(jordan_id(k + 1, i))

    def l0(bid):
        k, i = _parse_jordan(bid)
        out = {bid: n + k}
        if i == 1:
            out[jordan_id(k, 0)] = scale(k)
        return Vector(out)

    def l1(bid):
        k, i = _parse_jordan(bid)
        if k == 0:
            return ZERO_VECTOR
        out = {jordan_id(k - 1, i): 2 * k * n + k * (k - 1)}
        if i == 1:
            out[jordan_id(k - 1, 0)] = mpq(2 * k)
        return Vector(out)

    def mode(v, m, w):
        return Vector.basis(w) if m == -1 else ZERO_VECTOR

    def trunc(v, w):
        if v != "1":
            raise KeyError(f"unknown algebra id {v!r}")
        _parse_jordan(w)
        return -1

    sl2 = {-1: Operator(lm1), 0: Operator(l0), 1: Operator(l1)}
    return Module(alg, space, GeneratedModes(mode, trunc), sl2, name="jordan toy",
                  preset={"preset": "jordan_toy", "params": {"n": fmt(n), "corrupt": corrupt}})


def nilpotent_part(mod: Module):
    """L(0) - L(0)_s as an operator on W."""
    return Operator(lambda b: mod.L(0, Vector.basis(b)) - mod.L0s(Vector.basis(b)))


def build_trivial_module(kind: str = "mobius") -> Module:
    return Module.adjoint(build_trivial(kind))


# ---------------------------------------------------------------- no sl(2)


def derivation_of(alg: VertexAlgebra, b: str) -> Vector:
    """D b = b_{-2} 1, which the creation and derivative axioms force to be L(-1) b."""
    return alg.mode(Vector.basis(b), -2, alg.vacuum)


def prove_no_sl2(alg: VertexAlgebra, max_wt=None) -> CheckReport:
    """Decide whether a finite-dimensional vertex algebra admits an sl(2)
    triple with L(-1) = D, L(0) diagonal in the given basis.

    Unknowns are the diagonal entries of L(0) and all entries of L(1).  The
    linear constraints ([L(0),L(-1)] = L(-1), [L(-1),L(1)] = -2L(0),
    L(0)1 = 0, L(1)1 = 0 and the weight formula) are solved exactly; an
    infeasible system comes with a combination of constraints reducing to
    0 = 1.  Feasible solutions are then tested on [L(0),L(1)] = -L(1).

    For an infinite space a weight window must be given, and only the
    algebra's own operators are tested there ("window-feasible").
    """
    report = CheckReport()
    if not alg.space.finite:
        if max_wt is None:
            raise NotFiniteDimensional("prove_no_sl2 needs a finite-dimensional algebra or a weight window")
        if alg.kind == "plain":
            raise NotFiniteDimensional("no candidate operators to test on the window")
        basis = [b.id for b in alg.space.all_basis(-max_wt, max_wt)]
        inner = CheckReport()
        L = lambda j, x: alg.L(j, x)  # noqa: E731
        sl2_bracket_check(inner, L, basis)
        bad = [b for b in basis if alg.L(-1, Vector.basis(b)) != derivation_of(alg, b)]
        ok = inner.passed and not bad
        report.add("sl2_window_feasible", ok,
                   f"the algebra's own L(j) satisfy the constraints on {len(basis)} vectors",
                   None if ok else {"inputs": {"v": bad[:1]}, "detail": "L(-1) != D or bracket failure"})
        return report
    ids = [b.id for b in alg.space.all_basis()]
    unit = alg.vacuum.support()[0]
    D = {b: derivation_of(alg, b) for b in ids}
    sys = SparseSystem()
    lam = lambda b: ("L0", b)  # noqa: E731
    x = lambda c, b: ("L1", c, b)  # noqa: E731
    for b in ids:
        for c in ids:
            d = D[b][c]
            if d:
                coeffs = {lam(c): d}
                coeffs[lam(b)] = coeffs.get(lam(b), ZERO) - d
                sys.add(coeffs, d, f"[L(0),L(-1)]=L(-1) at ({c},{b})")
            coeffs = {}
            for a in ids:
                if D[a][c]:
                    coeffs[x(a, b)] = coeffs.get(x(a, b), ZERO) + D[a][c]
                if D[b][a]:
                    coeffs[x(c, a)] = coeffs.get(x(c, a), ZERO) - D[b][a]
            if c == b:
                coeffs[lam(b)] = coeffs.get(lam(b), ZERO) + 2
            sys.add(coeffs, ZERO, f"[L(-1),L(1)]=-2L(0) at ({c},{b})")
    sys.add({lam(unit): ONE}, ZERO, "L(0)1=0")
    for c in ids:
        sys.add({x(c, unit): ONE}, ZERO, f"L(1)1=0 at {c}")
    for a in ids:
        for b in ids:
            t = alg.modes.trunc(a, b)
            if t is None:
                continue
            for n in range(-6, t + 1):
                for c in alg.modes.mode(a, n, b).c:
                    sys.add({lam(c): ONE, lam(a): -ONE, lam(b): -ONE}, mpq(-n - 1),
                            f"weight formula for ({a})_{n}({b}) -> {c}")
    status, data = sys.solve()
    if status == "infeasible":
        cert = {label: fmt(mult) for label, mult in sorted(data.items())}
        report.add("no_sl2", True, "linear constraints are inconsistent", coverage={"certificate": cert})
        return report
    lam_val = {b: data.get(lam(b), ZERO) for b in ids}
    x_val = {(c, b): data.get(x(c, b), ZERO) for c in ids for b in ids}
    for c in ids:
        for b in ids:
            if (lam_val[c] - lam_val[b] + 1) * x_val[(c, b)] != 0:
                report.add("no_sl2", False, "feasibility undecided: particular solution violates [L(0),L(1)]",
                           {"inputs": {"c": c, "b": b}})
                return report
    nonint = [b for b in ids if re_part(lam_val[b]) != lam_val[b] or mpq(lam_val[b]).denominator != 1]
    if nonint:
        report.add("no_sl2", False, "particular solution has nonintegral weights; feasibility undecided",
                   {"inputs": {"v": nonint[0]}, "lhs": fmt(lam_val[nonint[0]])})
        return report
    report.add("sl2_feasible", True, "found L(0) = diag(" + ", ".join(f"{b}:{fmt(lam_val[b])}" for b in ids) + ")",
               coverage={"L0": {b: fmt(v) for b, v in lam_val.items()},
                         "L1": {f"{c}<-{b}": fmt(v) for (c, b), v in x_val.items() if v}})
    return report


PRESETS = {
    "poly_mobius_lb": build_poly_mobius_lb,
    "poly_minus_d": build_poly_minus_d,
    "two_dim": build_two_dim,
    "trivial": build_trivial,
    "dual_numbers_conformal": build_conformal_fixture,
}
