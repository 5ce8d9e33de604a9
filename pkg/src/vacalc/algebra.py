"""Vertex algebras given by mode tables, and their axiom checks.

Modes are stored per basis triple: ``u_n v`` for basis ids u, v and n in Z.
A ``ModeSource`` returns these vectors and an upper bound ``trunc(u, v)`` on
the n for which u_n v can be nonzero (None when u_n v = 0 for every n).  All
the coefficient identities below are finite sums because of that bound.

The Jacobi identity is checked through its coefficient of
x0^(-l-1) x1^(-m-1) x2^(-n-1):

    sum_i (-1)^i C(l,i) [u_{l+m-i} v_{n+i} - (-1)^l v_{l+n-i} u_{m+i}] w
        = sum_i C(m,i) (u_{l+i} v)_{m+n-i} w,

which is what one gets by expanding the three delta-function terms with the
binomial convention and collecting monomials.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Callable, Iterable

from gmpy2 import mpq

from .errors import MissingTableEntry
from .grading import ZERO_VECTOR, Space, Vector, audit_lower_truncation, check_grading_consistency, vsum
from .report import CheckReport
from .scalar import ONE, ZERO, binomial, fmt, re_part, sign
from .series import Family, FormalSeries, Window

DEFAULT_MAX_WT = 8
JACOBI_WINDOW = Window.symmetric(2)


class ModeSource:
    """u_n v on basis ids."""

    def mode(self, u: str, n: int, v: str) -> Vector:
        raise NotImplementedError

    def trunc(self, u: str, v: str):
        raise NotImplementedError


class TableModes(ModeSource):
    """Modes from an explicit table; absent entries of known ids are zero.

    ``known_left``/``known_right`` decide which ids the table speaks for; a
    request outside them raises MissingTableEntry.
    """

    def __init__(self, entries: dict, known_left: Callable[[str], bool], known_right: Callable[[str], bool]):
        self.entries = {k: v for k, v in entries.items() if not v.is_zero()}
        self._known_left = known_left
        self._known_right = known_right
        self._trunc = {}
        for (u, v, n) in self.entries:
            t = self._trunc.get((u, v))
            self._trunc[(u, v)] = n if t is None or n > t else t

    def _require(self, u, v):
        if not self._known_left(u) or not self._known_right(v):
            raise MissingTableEntry(f"no table entry for ({u}, {v})")

    def mode(self, u, n, v):
        self._require(u, v)
        return self.entries.get((u, v, n), ZERO_VECTOR)

    def trunc(self, u, v):
        self._require(u, v)
        return self._trunc.get((u, v))


class GeneratedModes(ModeSource):
    """Modes computed by a function, memoized."""

    def __init__(self, fn: Callable[[str, int, str], Vector], trunc: Callable[[str, str], int | None]):
        self._fn = lru_cache(maxsize=None)(fn)
        self._trunc = lru_cache(maxsize=None)(trunc)

    def mode(self, u, n, v):
        t = self._trunc(u, v)
        if t is None or n > t:
            return ZERO_VECTOR
        return self._fn(u, n, v)

    def trunc(self, u, v):
        return self._trunc(u, v)


class Operator:
    """Linear operator given on basis ids, memoized."""

    def __init__(self, fn: Callable[[str], Vector] | dict):
        if isinstance(fn, dict):
            table = fn
            self.table = table
            fn = lambda b: table.get(b, ZERO_VECTOR)  # noqa: E731
        else:
            self.table = None
        self._fn = lru_cache(maxsize=None)(fn)

    def on_basis(self, b: str) -> Vector:
        return self._fn(b)

    def __call__(self, v: Vector) -> Vector:
        return vsum(self._fn(b) * c for b, c in v.c.items())


ZERO_OPERATOR = Operator(lambda b: ZERO_VECTOR)


def act(modes: ModeSource, u: Vector, n: int, w: Vector) -> Vector:
    """Bilinear extension of the basis modes."""
    parts = []
    for a, ca in u.c.items():
        for b, cb in w.c.items():
            out = modes.mode(a, n, b)
            if out.c:
                parts.append(out * (ca * cb))
    return vsum(parts)


def trunc_vec(modes: ModeSource, u: Vector, w: Vector):
    best = None
    for a in u.c:
        for b in w.c:
            t = modes.trunc(a, b)
            if t is not None and (best is None or t > best):
                best = t
    return best


class VertexAlgebra:
    """A vertex algebra given by a mode table.

    ``kind`` is "plain" (no grading structure checked), "mobius" (``sl2``
    holds L(-1), L(0), L(1)) or "conformal" (``omega`` and central charge).
    """

    def __init__(self, space: Space, modes: ModeSource, vacuum: Vector, kind: str = "mobius",
                 sl2: dict | None = None, omega: Vector | None = None, central_charge=ZERO,
                 name: str = "", preset: dict | None = None):
        if kind not in ("plain", "mobius", "conformal"):
            raise ValueError(f"unknown algebra kind {kind!r}")
        self.space = space
        self.modes = modes
        self.vacuum = vacuum
        self.kind = kind
        self.sl2 = sl2 or {}
        self.omega = omega
        self.central_charge = central_charge
        self.name = name
        self.preset = preset

    def mode(self, u: Vector, n: int, v: Vector) -> Vector:
        return act(self.modes, u, n, v)

    def L(self, j: int, v: Vector) -> Vector:
        if self.kind == "conformal":
            return self.mode(self.omega, j + 1, v)
        if self.kind == "mobius":
            return self.sl2[j](v)
        raise ValueError("a plain vertex algebra has no L(j)")

    def L_basis(self, j: int, b: str) -> Vector:
        if self.kind == "mobius":
            return self.sl2[j].on_basis(b)
        return self.L(j, Vector.basis(b))

    def weight(self, b: str):
        return self.space.weight(b)

    def as_module(self):
        from .modules import Module

        return Module.adjoint(self)


def vertex_op(alg, u: Vector, v: Vector, window: Window | None = None, var: str = "x") -> FormalSeries:
    """Y(u, x) v truncated to the window, as a series with Vector coefficients."""
    modes = alg.modes if hasattr(alg, "modes") else alg
    window = window or Window()
    lo, hi = window.range(var)
    t = trunc_vec(modes, u, v)
    if t is None:
        return FormalSeries()
    bases = {}
    for n in range(-int(hi) - 1, min(t, -int(lo) - 1) + 1):
        vec = act(modes, u, n, v)
        if vec.c:
            bases[(mpq(-n - 1),)] = vec
    return FormalSeries([Family((var,), bases)]) if bases else FormalSeries()


# ---------------------------------------------------------------- windows


def mode_range(window: Window, var: str = "x"):
    """Mode indices n whose monomial x^(-n-1) lies in the window."""
    lo, hi = window.range(var)
    return range(-int(hi) - 1, -int(lo))


def weight_window(space: Space, max_wt=DEFAULT_MAX_WT, min_wt=None):
    lo = -max_wt if min_wt is None else min_wt
    return space.all_basis(lo, max_wt)


# ---------------------------------------------------------------- Jacobi


def jacobi_sides(vmodes: ModeSource, wmodes: ModeSource, u: str, v: str, w: str, l: int, m: int, n: int):
    """(LHS, RHS) vectors of the Jacobi coefficient at (l, m, n).

    ``vmodes`` gives u_k v inside the algebra, ``wmodes`` the action on w.
    """
    U, Vv, Wv = Vector.basis(u), Vector.basis(v), Vector.basis(w)
    parts = []
    t_vw = wmodes.trunc(v, w)
    if t_vw is not None:
        top = t_vw - n
        if l >= 0:
            top = min(top, l)
        for i in range(0, top + 1):
            inner = wmodes.mode(v, n + i, w)
            if inner.c:
                c = binomial(mpq(l), i) * sign(i)
                if c:
                    parts.append(act(wmodes, U, l + m - i, inner) * c)
    t_uw = wmodes.trunc(u, w)
    if t_uw is not None:
        top = t_uw - m
        if l >= 0:
            top = min(top, l)
        for i in range(0, top + 1):
            inner = wmodes.mode(u, m + i, w)
            if inner.c:
                c = binomial(mpq(l), i) * sign(l + i)
                if c:
                    parts.append(act(wmodes, Vv, l + n - i, inner) * (-c))
    lhs = vsum(parts)
    parts = []
    t_uv = vmodes.trunc(u, v)
    if t_uv is not None:
        top = t_uv - l
        if m >= 0:
            top = min(top, m)
        for i in range(0, top + 1):
            inner = vmodes.mode(u, l + i, v)
            if inner.c:
                c = binomial(mpq(m), i)
                if c:
                    parts.append(act(wmodes, inner, m + n - i, Wv) * c)
    rhs = vsum(parts)
    return lhs, rhs


def check_jacobi_triple(alg, u: str, v: str, w: str, window: Window | None = None,
                        module=None, report: CheckReport | None = None, name: str = "jacobi") -> CheckReport:
    """Compare every x0^a x1^b x2^c coefficient of the Jacobi identity in the window."""
    report = report if report is not None else CheckReport()
    window = window or Window.symmetric(4)
    wmodes = module.modes if module is not None else alg.modes
    ok = True
    count = 0
    for l in mode_range(window, "x0"):
        for m in mode_range(window, "x1"):
            for n in mode_range(window, "x2"):
                lhs, rhs = jacobi_sides(alg.modes, wmodes, u, v, w, l, m, n)
                count += 1
                if lhs != rhs:
                    report.add(name, False, "Jacobi coefficient mismatch", {
                        "inputs": {"u": u, "v": v, "w": w},
                        "monomial": f"x0^{-l - 1}*x1^{-m - 1}*x2^{-n - 1}",
                        "lhs": lhs, "rhs": rhs})
                    return report
    report.add(name, ok, f"({u}, {v}, {w}): {count} coefficients")
    return report


def default_triples(basis_u, basis_v, basis_w, sample=None):
    if sample is not None:
        return list(sample)
    return list(itertools.product(basis_u, basis_v, basis_w))


# ---------------------------------------------------------------- checks


def _ids(bs):
    return [b.id for b in bs]


def _vacuum_check(report, alg, wmodes, wbasis, modes_n, name="vacuum"):
    for w in wbasis:
        for n in modes_n:
            out = act(wmodes, alg.vacuum, n, Vector.basis(w))
            expect = Vector.basis(w) if n == -1 else ZERO_VECTOR
            if out != expect:
                return report.add(name, False, "Y(1,x) is not the identity",
                                  {"inputs": {"w": w, "n": n}, "lhs": out, "rhs": expect})
    return report.add(name, True, f"{len(wbasis)} vectors")


def _creation_check(report, alg, vbasis, modes_n):
    one = alg.vacuum
    for v in vbasis:
        V = Vector.basis(v)
        for n in modes_n:
            if n < -1:
                continue
            out = alg.mode(V, n, one)
            expect = V if n == -1 else ZERO_VECTOR
            if out != expect:
                return report.add("creation", False, "Y(v,x)1 fails the creation property",
                                  {"inputs": {"v": v, "n": n}, "lhs": out, "rhs": expect})
    return report.add("creation", True, f"{len(vbasis)} vectors")


def sl2_bracket_check(report, L, basis, name="sl2_brackets"):
    """[L0,L-1]=L-1, [L0,L1]=-L1, [L-1,L1]=-2L0 on each basis vector."""
    relations = [((0, -1), {-1: ONE}), ((0, 1), {1: -ONE}), ((-1, 1), {0: mpq(-2)})]
    for b in basis:
        B = Vector.basis(b)
        for (i, j), rhs_terms in relations:
            lhs = L(i, L(j, B)) - L(j, L(i, B))
            rhs = vsum(L(k, B) * c for k, c in rhs_terms.items())
            if lhs != rhs:
                return report.add(name, False, f"[L({i}),L({j})] relation fails",
                                  {"inputs": {"w": b}, "lhs": lhs, "rhs": rhs})
    return report.add(name, True, f"{len(basis)} vectors")


def virasoro_check(report, L, c, basis, rng=range(-3, 4), name="virasoro"):
    for b in basis:
        B = Vector.basis(b)
        for m in rng:
            for n in rng:
                lhs = L(m, L(n, B)) - L(n, L(m, B))
                rhs = L(m + n, B) * (m - n)
                if m + n == 0:
                    rhs = rhs + B * (mpq(m ** 3 - m, 12) * c)
                if lhs != rhs:
                    return report.add(name, False, f"[L({m}),L({n})] relation fails",
                                      {"inputs": {"w": b}, "lhs": lhs, "rhs": rhs})
    return report.add(name, True, f"{len(basis)} vectors, modes {rng.start}..{rng.stop - 1}")


def sl2_commutator_check(report, alg, wmodes, Lw, vbasis, wbasis, modes_n, name="sl2_commutators"):
    """[L(j), v_n] = sum_k C(j+1,k) (L(j-k)v)_{n+k} on W, for j = -1, 0, 1."""
    for v in vbasis:
        V = Vector.basis(v)
        Lv = {j: alg.L(j, V) for j in (-1, 0, 1)}
        for w in wbasis:
            W = Vector.basis(w)
            for n in modes_n:
                vw = act(wmodes, V, n, W)
                for j in (-1, 0, 1):
                    lhs = Lw(j, vw) - act(wmodes, V, n, Lw(j, W))
                    rhs = vsum(act(wmodes, Lv[j - k], n + k, W) * binomial(mpq(j + 1), k)
                               for k in range(0, j + 2))
                    if lhs != rhs:
                        return report.add(name, False, f"[L({j}), v_n] identity fails",
                                          {"inputs": {"v": v, "w": w, "n": n, "j": j}, "lhs": lhs, "rhs": rhs})
    return report.add(name, True, f"{len(vbasis)}x{len(wbasis)} pairs")


def derivative_check(report, alg, wmodes, vbasis, wbasis, modes_n, name="L(-1)_derivative"):
    """(L(-1)v)_n = -n v_{n-1}, the coefficient form of d/dx Y(v,x) = Y(L(-1)v,x)."""
    for v in vbasis:
        V = Vector.basis(v)
        LV = alg.L(-1, V)
        for w in wbasis:
            W = Vector.basis(w)
            for n in modes_n:
                lhs = act(wmodes, LV, n, W)
                rhs = act(wmodes, V, n - 1, W) * (-n)
                if lhs != rhs:
                    return report.add(name, False, "d/dx Y(v,x) != Y(L(-1)v,x)",
                                      {"inputs": {"v": v, "w": w}, "monomial": f"x^{-n - 1}",
                                       "lhs": lhs, "rhs": rhs})
    return report.add(name, True, f"{len(vbasis)}x{len(wbasis)} pairs")


def truncation_check(report, wmodes, vbasis, wbasis, extra=6, name="lower_truncation"):
    """u_n w vanishes just above the declared truncation bound."""
    for v in vbasis:
        for w in wbasis:
            t = wmodes.trunc(v, w)
            start = -1 if t is None else t
            for n in range(start + 1, start + 1 + extra):
                out = wmodes.mode(v, n, w)
                if out.c:
                    return report.add(name, False, "nonzero mode above truncation bound",
                                      {"inputs": {"v": v, "w": w, "n": n}, "lhs": out, "rhs": ZERO_VECTOR})
    return report.add(name, True)


def check_axioms(alg: VertexAlgebra, window: Window | None = None, sample=None, *,
                 max_wt=DEFAULT_MAX_WT, min_wt=None, jacobi_window: Window | None = None) -> CheckReport:
    """Vacuum, creation, Jacobi, and the sl(2)/Virasoro, L(-1)-derivative and
    L(0)-grading axioms, each on the given windows."""
    report = CheckReport()
    window = window or Window.symmetric(4)
    jw = jacobi_window or JACOBI_WINDOW
    basis = _ids(weight_window(alg.space, max_wt, min_wt))
    modes_n = mode_range(window)
    _vacuum_check(report, alg, alg.modes, basis, modes_n)
    _creation_check(report, alg, basis, modes_n)
    triples = default_triples(basis, basis, basis, sample)
    jac = CheckReport()
    for u, v, w in triples:
        check_jacobi_triple(alg, u, v, w, jw, report=jac)
        if not jac.passed:
            break
    if jac.passed:
        report.add("jacobi", True, f"{len(triples)} triples",
                   coverage={"triples": len(triples), "window": _window_desc(jw)})
    else:
        report.results.append(jac.failures()[0])
    truncation_check(report, alg.modes, basis, basis)
    if alg.kind == "plain":
        return report
    L = lambda j, x: alg.L(j, x)  # noqa: E731
    if alg.kind == "conformal":
        virasoro_check(report, L, alg.central_charge, basis)
    else:
        sl2_bracket_check(report, L, basis)
        sl2_commutator_check(report, alg, alg.modes, L, basis, basis, modes_n)
    derivative_check(report, alg, alg.modes, basis, basis, modes_n)
    grading_check(report, alg, basis)
    return report


def grading_check(report, alg, basis, name="L(0)_grading"):
    for b in basis:
        B = Vector.basis(b)
        lhs = alg.L(0, B)
        rhs = B * alg.weight(b)
        if lhs != rhs:
            return report.add(name, False, "L(0)v != (wt v) v", {"inputs": {"v": b}, "lhs": lhs, "rhs": rhs})
    return report.add(name, True, f"{len(basis)} vectors")


def _window_desc(w: Window):
    return {"default": list(w.default) if w.default else None, "bounds": {v: list(b) for v, b in w.bounds}}


def check_strong_grading(alg: VertexAlgebra, *, max_wt=DEFAULT_MAX_WT, min_wt=None,
                         window: Window | None = None) -> CheckReport:
    report = CheckReport()
    lo = -max_wt if min_wt is None else min_wt
    space = alg.space
    w = audit_lower_truncation(space, lo, max_wt)
    report.add("lower_truncation_per_degree", w is None, "least weight per column", w)
    w = check_grading_consistency(space, lo, max_wt)
    report.add("finite_cells", w is None, "each basis vector in one finite cell", w)
    zero = space.zero_degree
    vac = alg.vacuum
    ok = all(space.degree(b) == zero and space.weight(b) == 0 for b in vac.c)
    report.add("vacuum_placement", ok, "1 in V^(0)_(0)", None if ok else {"vacuum": vac})
    if alg.kind == "conformal":
        om = alg.omega
        ok = all(space.degree(b) == zero and space.weight(b) == 2 for b in om.c)
        report.add("omega_placement", ok, "omega in V^(0)_(2)", None if ok else {"omega": om})
    basis = weight_window(space, max_wt, min_wt)
    modes_n = mode_range(window or Window.symmetric(4))
    for u in basis:
        for v in basis:
            for n in modes_n:
                out = alg.modes.mode(u.id, n, v.id)
                target = tuple(a + b for a, b in zip(u.degree, v.degree))
                bad = [b for b in out.c if space.degree(b) != target]
                if bad:
                    report.add("mode_degree", False, "v_l maps V^(b) outside V^(a+b)",
                               {"inputs": {"u": u.id, "v": v.id, "n": n}, "lhs": out, "rhs": list(target)})
                    break
            else:
                continue
            break
        else:
            continue
        break
    else:
        report.add("mode_degree", True, f"{len(basis)}^2 pairs")
    if alg.kind != "plain":
        for b in basis:
            for j in (-1, 0, 1):
                out = alg.L(j, Vector.basis(b.id))
                if any(space.degree(c) != b.degree for c in out.c):
                    report.add("L_degree", False, "L(j) changes the group degree",
                               {"inputs": {"v": b.id, "j": j}, "lhs": out})
                    break
            else:
                continue
            break
        else:
            report.add("L_degree", True)
    return report


def weight_shift_check(alg: VertexAlgebra, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT,
                       min_wt=None) -> CheckReport:
    """wt(u_n v) = wt u + wt v - n - 1 and wt(L(j)v) = wt v - j on the table window."""
    report = CheckReport()
    if alg.kind == "plain":
        report.skip("weight_shift", "plain vertex algebra carries no grading")
        return report
    module = alg.as_module()
    from .modules import weight_formula_check

    return weight_formula_check(module, window, max_wt=max_wt, min_wt=min_wt, commutator=False)


def check_all(alg: VertexAlgebra, window=None, sample=None, *, max_wt=DEFAULT_MAX_WT, min_wt=None,
              jacobi_window=None) -> CheckReport:
    report = CheckReport()
    report.extend(check_axioms(alg, window, sample, max_wt=max_wt, min_wt=min_wt,
                               jacobi_window=jacobi_window), "axioms.")
    if alg.kind != "plain":
        report.extend(check_strong_grading(alg, max_wt=max_wt, min_wt=min_wt, window=window), "strong_grading.")
        report.extend(weight_shift_check(alg, window, max_wt=max_wt, min_wt=min_wt), "weights.")
    return report


def commutator_formula_check(alg, u: str, v: str, w: str, window: Window | None = None):
    """Res_x0 of the Jacobi identity: [u_m, v_n] = sum_i C(m,i) (u_i v)_{m+n-i}."""
    window = window or Window.symmetric(3)
    report = CheckReport()
    for m in mode_range(window, "x1"):
        for n in mode_range(window, "x2"):
            lhs, rhs = jacobi_sides(alg.modes, alg.modes, u, v, w, 0, m, n)
            if lhs != rhs:
                report.add("commutator_formula", False, "", {"inputs": [u, v, w, m, n], "lhs": lhs, "rhs": rhs})
                return report
    report.add("commutator_formula", True)
    return report


def describe(x) -> str:
    return fmt(x) if not isinstance(x, Vector) else str(x)


def is_weight_integral(space: Space, basis: Iterable[str]) -> bool:
    return all(re_part(space.weight(b)) == space.weight(b) and space.weight(b).denominator == 1 for b in basis)
