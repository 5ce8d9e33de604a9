"""Generalized modules, opposite vertex operators and contragredients.

A module shares the algebra's conventions: basis-level modes ``v_n w`` from
a ``ModeSource`` whose left ids belong to V and right ids to W.  L(j) on W is
either a given sl(2) triple (Mobius case) or read off from omega (conformal).

Opposite modes are

    v^o_n = (-1)^k sum_m (1/m!) (L(1)^m v)_{-n-m-2+2k}        (wt v = k),

and the contragredient W' is built cell by cell: v_n b* is the transpose of
v^o_n restricted to the finite cells that pair with b.
"""

from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

from .algebra import (
    DEFAULT_MAX_WT,
    JACOBI_WINDOW,
    ModeSource,
    Operator,
    VertexAlgebra,
    act,
    default_triples,
    derivative_check,
    jacobi_sides,
    mode_range,
    sl2_bracket_check,
    sl2_commutator_check,
    truncation_check,
    trunc_vec,
    virasoro_check,
    weight_window,
    _vacuum_check,
    _window_desc,
)
from .errors import NotAHomomorphism, NotLocallyNilpotent, NotStronglyGraded
from .grading import (
    UNBOUNDED_BELOW,
    ZERO_VECTOR,
    BasisVector,
    CellGenerator,
    Space,
    Vector,
    audit_lower_truncation,
    dual_id,
    homogeneous_parts,
    weight_class,
    vsum,
)
from .report import CheckReport
from .scalar import ONE, binomial, factorial, fmt, re_part, sign
from .series import Family, FormalSeries, Window

NILPOTENCE_CAP = 256
# opposite modes v^o_n are nonzero for large n, i.e. for negative exponents
OPPOSITE_JACOBI_WINDOW = Window(default=(-6, 2))


class Module:
    """A (generalized) module over a vertex algebra."""

    def __init__(self, algebra: VertexAlgebra, space: Space, modes: ModeSource, sl2: dict | None = None,
                 name: str = "", opposite_sign: bool = True, preset: dict | None = None,
                 construction: dict | None = None):
        self.algebra = algebra
        self.space = space
        self.modes = modes
        self.sl2 = sl2 or {}
        self.name = name
        self.opposite_sign = opposite_sign
        self.preset = preset
        self.construction = construction
        self._opp = None

    @classmethod
    def adjoint(cls, alg: VertexAlgebra, opposite_sign: bool = True) -> "Module":
        """V as a module over itself."""
        return cls(alg, alg.space, alg.modes, alg.sl2 if alg.kind == "mobius" else None,
                   name=alg.name, opposite_sign=opposite_sign, preset=alg.preset)

    @property
    def generalized(self) -> bool:
        return self.space.generalized

    def act(self, v: Vector, n: int, w: Vector) -> Vector:
        return act(self.modes, v, n, w)

    def L(self, j: int, w: Vector) -> Vector:
        alg = self.algebra
        if alg.kind == "conformal":
            return self.act(alg.omega, j + 1, w)
        if alg.kind == "mobius":
            return self.sl2[j](w)
        raise ValueError("modules over a plain vertex algebra carry no L(j)")

    def L0s(self, w: Vector) -> Vector:
        """Semisimple part of L(0): multiplication by the cell weight."""
        return vsum(Vector.basis(b, c * self.space.weight(b)) for b, c in w.c.items())

    @property
    def opposite(self) -> "OppositeModes":
        if self._opp is None:
            self._opp = OppositeModes(self)
        return self._opp

    def opp(self, v: Vector, n: int, w: Vector) -> Vector:
        return act(self.opposite, v, n, w)


# ---------------------------------------------------------------- opposite


def l1_chain(alg: VertexAlgebra, v: str, cap: int = NILPOTENCE_CAP) -> list:
    """[v, L(1)v, L(1)^2 v, ...] up to the last nonzero power."""
    chain = [Vector.basis(v)]
    while True:
        nxt = alg.L(1, chain[-1])
        if nxt.is_zero():
            return chain
        chain.append(nxt)
        if len(chain) > cap:
            raise NotLocallyNilpotent(f"L(1)^{cap} {v} is still nonzero")


class OppositeModes(ModeSource):
    """v^o_n w on basis ids; ``trunc`` is unused, ``low`` bounds n from below."""

    def __init__(self, module: Module):
        self.module = module
        alg = module.algebra
        self._chain = lru_cache(maxsize=None)(lambda v: tuple(
            c * (ONE / factorial(m)) for m, c in enumerate(l1_chain(alg, v))))
        self._mode = lru_cache(maxsize=None)(self._compute)
        self._low = lru_cache(maxsize=None)(self._compute_low)

    def _k(self, v):
        k = self.module.algebra.weight(v)
        return int(k)

    def _compute(self, v, n, w):
        k = self._k(v)
        W = Vector.basis(w)
        parts = [act(self.module.modes, c, -n - m - 2 + 2 * k, W) for m, c in enumerate(self._chain(v))]
        out = vsum(parts)
        if self.module.opposite_sign and k % 2:
            out = -out
        return out

    def _compute_low(self, v, w):
        k = self._k(v)
        best = None
        for m, c in enumerate(self._chain(v)):
            t = trunc_vec(self.module.modes, c, Vector.basis(w))
            if t is not None:
                cand = 2 * k - m - 2 - t
                best = cand if best is None or cand < best else best
        return best

    def low(self, v: str, w: str):
        return self._low(v, w)

    def mode(self, v, n, w):
        lo = self._low(v, w)
        if lo is None or n < lo:
            return ZERO_VECTOR
        return self._mode(v, n, w)

    def trunc(self, v, w):
        raise NotImplementedError("opposite modes are bounded below, not above")


def low_vec(opp: OppositeModes, v: Vector, w: Vector):
    best = None
    for a in v.c:
        for b in w.c:
            t = opp.low(a, b)
            if t is not None and (best is None or t < best):
                best = t
    return best


def module_action(mod: Module, v: Vector, w: Vector, window: Window | None = None, var: str = "x") -> FormalSeries:
    from .algebra import vertex_op

    return vertex_op(mod.modes, v, w, window, var)


def opposite_op(mod: Module, v: Vector, w: Vector, window: Window | None = None, var: str = "x") -> FormalSeries:
    """Y^o_W(v, x) w on the window; a series in W((x^-1))."""
    window = window or Window()
    lo_e, hi_e = window.range(var)
    opp = mod.opposite
    low = low_vec(opp, v, w)
    if low is None:
        return FormalSeries()
    bases = {}
    for n in range(max(low, -int(hi_e) - 1), -int(lo_e)):
        out = act(opp, v, n, w)
        if out.c:
            bases[(mpq(-n - 1),)] = out
    return FormalSeries([Family((var,), bases)]) if bases else FormalSeries()


def opposite_jacobi_sides(mod: Module, u: str, v: str, w: str, l: int, m: int, n: int):
    """Coefficient of x0^(-l-1) x1^(-m-1) x2^(-n-1) in the opposite Jacobi identity.

    LHS: sum_i (-1)^i C(l,i) [v^o_{n+i} u^o_{l+m-i} - (-1)^l u^o_{m+i} v^o_{l+n-i}] w
    RHS: sum_i C(m,i) (u_{l+i} v)^o_{m+n-i} w
    """
    opp = mod.opposite
    alg = mod.algebra
    U, Vv = Vector.basis(u), Vector.basis(v)
    parts = []
    lo_uw = opp.low(u, w)
    if lo_uw is not None:
        top = l + m - lo_uw
        if l >= 0:
            top = min(top, l)
        for i in range(0, top + 1):
            inner = opp.mode(u, l + m - i, w)
            if inner.c:
                c = binomial(mpq(l), i) * sign(i)
                if c:
                    parts.append(act(opp, Vv, n + i, inner) * c)
    lo_vw = opp.low(v, w)
    if lo_vw is not None:
        top = l + n - lo_vw
        if l >= 0:
            top = min(top, l)
        for i in range(0, top + 1):
            inner = opp.mode(v, l + n - i, w)
            if inner.c:
                c = binomial(mpq(l), i) * sign(l + i)
                if c:
                    parts.append(act(opp, U, m + i, inner) * (-c))
    lhs = vsum(parts)
    parts = []
    t_uv = alg.modes.trunc(u, v)
    if t_uv is not None:
        top = t_uv - l
        if m >= 0:
            top = min(top, m)
        W = Vector.basis(w)
        for i in range(0, top + 1):
            inner = alg.modes.mode(u, l + i, v)
            if inner.c:
                c = binomial(mpq(m), i)
                if c:
                    parts.append(act(opp, inner, m + n - i, W) * c)
    return lhs, vsum(parts)


# ---------------------------------------------------------------- checks


def _ids(bs):
    return [b.id for b in bs]


def _bases(mod, max_wt, min_wt):
    return (_ids(weight_window(mod.algebra.space, max_wt, min_wt)),
            _ids(weight_window(mod.space, max_wt, min_wt)))


def _run_jacobi(report, name, triples, window, sides):
    for u, v, w in triples:
        for l in mode_range(window, "x0"):
            for m in mode_range(window, "x1"):
                for n in mode_range(window, "x2"):
                    lhs, rhs = sides(u, v, w, l, m, n)
                    if lhs != rhs:
                        return report.add(name, False, "Jacobi coefficient mismatch", {
                            "inputs": {"u": u, "v": v, "w": w},
                            "monomial": f"x0^{-l - 1}*x1^{-m - 1}*x2^{-n - 1}", "lhs": lhs, "rhs": rhs})
    return report.add(name, True, f"{len(triples)} triples",
                      coverage={"triples": len(triples), "window": _window_desc(window)})


def generalized_weight_check(report, mod, wbasis, name="weight_condition"):
    """(L(0)-n) acts on each basis vector with the declared Jordan position."""
    for b in wbasis:
        info = mod.space.basis(b)
        B = Vector.basis(b)
        shifted = mod.L(0, B) - B * info.weight
        if not mod.generalized:
            if shifted.c:
                return report.add(name, False, "(L(0)-wt w)w != 0 in an ordinary module",
                                  {"inputs": {"w": b}, "lhs": shifted, "rhs": ZERO_VECTOR})
            continue
        x = B
        for step in range(info.jordan_index + 1):
            if x.is_zero():
                return report.add(name, False, "Jordan chain shorter than declared",
                                  {"inputs": {"w": b, "power": step}, "lhs": x, "rhs": "nonzero"})
            x = mod.L(0, x) - x * info.weight
        if x.c:
            return report.add(name, False, "(L(0)-n)^N w != 0",
                              {"inputs": {"w": b, "power": info.jordan_index + 1}, "lhs": x, "rhs": ZERO_VECTOR})
    kind = "generalized" if mod.generalized else "ordinary"
    return report.add(name, True, f"{kind}, {len(wbasis)} vectors")


def check_module_axioms(mod: Module, window: Window | None = None, sample=None, *, max_wt=DEFAULT_MAX_WT,
                        min_wt=None, jacobi_window: Window | None = None) -> CheckReport:
    report = CheckReport()
    window = window or Window.symmetric(4)
    jw = jacobi_window or JACOBI_WINDOW
    alg = mod.algebra
    vbasis, wbasis = _bases(mod, max_wt, min_wt)
    modes_n = mode_range(window)
    _vacuum_check(report, alg, mod.modes, wbasis, modes_n)
    triples = default_triples(vbasis, vbasis, wbasis, sample)
    _run_jacobi(report, "jacobi", triples, jw,
                lambda u, v, w, l, m, n: jacobi_sides(alg.modes, mod.modes, u, v, w, l, m, n))
    truncation_check(report, mod.modes, vbasis, wbasis)
    if alg.kind == "plain":
        return report
    L = mod.L
    if alg.kind == "conformal":
        virasoro_check(report, L, alg.central_charge, wbasis)
    else:
        sl2_bracket_check(report, L, wbasis)
    sl2_commutator_check(report, alg, mod.modes, L, vbasis, wbasis, modes_n)
    derivative_check(report, alg, mod.modes, vbasis, wbasis, modes_n)
    generalized_weight_check(report, mod, wbasis)
    return report


def weight_formula_check(mod: Module, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT, min_wt=None,
                         commutator: bool = True) -> CheckReport:
    """wt(v_n w) = wt v + wt w - n - 1, wt(L(j)w) = wt w - j, and
    [L(0), v_n] = (L(0)v)_n + (-n-1) v_n on the window."""
    report = CheckReport()
    alg = mod.algebra
    if alg.kind == "plain":
        report.skip("weight_formula", "plain vertex algebra carries no grading")
        return report
    window = window or Window.symmetric(4)
    vbasis, wbasis = _bases(mod, max_wt, min_wt)
    modes_n = mode_range(window)
    sw = mod.space.weight
    entries = 0
    failed = False
    for v in vbasis:
        kv = alg.weight(v)
        for w in wbasis:
            for n in modes_n:
                out = mod.modes.mode(v, n, w)
                entries += 1
                expect = kv + sw(w) - n - 1
                bad = [b for b in out.c if sw(b) != expect]
                if bad:
                    report.add("weight_formula", False, "wt(v_n w) != wt v + wt w - n - 1", {
                        "inputs": {"v": v, "w": w, "n": n}, "lhs": fmt(sw(bad[0])), "rhs": fmt(expect)})
                    failed = True
                    break
            if failed:
                break
        if failed:
            break
    if not failed:
        report.add("weight_formula", True, f"{entries} table entries",
                   coverage={"entries": entries})
    for w in wbasis:
        bad = None
        for j in (-1, 0, 1):
            out = mod.L(j, Vector.basis(w))
            wrong = [b for b in out.c if sw(b) != sw(w) - j]
            if wrong:
                bad = (j, wrong[0])
                break
        if bad:
            report.add("L_weight", False, "wt(L(j)w) != wt w - j",
                       {"inputs": {"w": w, "j": bad[0]}, "lhs": fmt(sw(bad[1])), "rhs": fmt(sw(w) - bad[0])})
            break
    else:
        report.add("L_weight", True, f"{len(wbasis)} vectors")
    if commutator:
        for v in vbasis:
            V = Vector.basis(v)
            L0v = alg.L(0, V)
            for w in wbasis:
                W = Vector.basis(w)
                for n in modes_n:
                    lhs = mod.L(0, mod.act(V, n, W)) - mod.act(V, n, mod.L(0, W))
                    rhs = mod.act(L0v, n, W) + mod.act(V, n, W) * (-n - 1)
                    if lhs != rhs:
                        report.add("L0_commutator", False, "[L(0),v_n] != (L(0)v)_n + (-n-1)v_n",
                                   {"inputs": {"v": v, "w": w, "n": n}, "lhs": lhs, "rhs": rhs})
                        return report
        report.add("L0_commutator", True)
    return report


def semisimple_part_check(mod: Module, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT,
                          min_wt=None) -> CheckReport:
    """[L(0)_s, v_n] = [L(0), v_n] and [L(0)_s, L(j)] = [L(0), L(j)]."""
    report = CheckReport()
    window = window or Window.symmetric(4)
    vbasis, wbasis = _bases(mod, max_wt, min_wt)
    modes_n = mode_range(window)
    L, Ls = mod.L, mod.L0s
    for v in vbasis:
        V = Vector.basis(v)
        for w in wbasis:
            W = Vector.basis(w)
            for n in modes_n:
                vw = mod.act(V, n, W)
                lhs = Ls(vw) - mod.act(V, n, Ls(W))
                rhs = L(0, vw) - mod.act(V, n, L(0, W))
                if lhs != rhs:
                    report.add("L0s_modes", False, "[L(0)_s, v_n] != [L(0), v_n]",
                               {"inputs": {"v": v, "w": w, "n": n}, "lhs": lhs, "rhs": rhs})
                    break
            else:
                continue
            break
        else:
            continue
        break
    else:
        report.add("L0s_modes", True)
    for w in wbasis:
        W = Vector.basis(w)
        for j in (-1, 0, 1):
            lhs = Ls(L(j, W)) - L(j, Ls(W))
            rhs = L(0, L(j, W)) - L(j, L(0, W))
            if lhs != rhs:
                report.add("L0s_sl2", False, "[L(0)_s, L(j)] != [L(0), L(j)]",
                           {"inputs": {"w": w, "j": j}, "lhs": lhs, "rhs": rhs})
                return report
    report.add("L0s_sl2", True)
    return report


def congruence_closure_check(mod: Module, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT,
                             min_wt=None) -> CheckReport:
    """Each weight class modulo Z is stable under v_n and L(j)."""
    report = CheckReport()
    window = window or Window.symmetric(4)
    vbasis, wbasis = _bases(mod, max_wt, min_wt)
    sw = mod.space.weight
    for w in wbasis:
        cls = weight_class(sw(w))
        outs = [(f"v={v},n={n}", mod.modes.mode(v, n, w)) for v in vbasis for n in mode_range(window)]
        if mod.algebra.kind != "plain":
            outs += [(f"L({j})", mod.L(j, Vector.basis(w))) for j in (-1, 0, 1)]
        for label, out in outs:
            bad = [b for b in out.c if weight_class(sw(b)) != cls]
            if bad:
                report.add("congruence_closure", False, "operator leaves the congruence class",
                           {"inputs": {"w": w, "op": label}, "lhs": fmt(sw(bad[0])), "rhs": fmt(sw(w))})
                return report
    report.add("congruence_closure", True, f"{len(wbasis)} vectors")
    return report


def opposite_degree_check(mod: Module, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT,
                          min_wt=None) -> CheckReport:
    report = CheckReport()
    window = window or Window.symmetric(4)
    vbasis, wbasis = _bases(mod, max_wt, min_wt)
    sw = mod.space.weight
    for v in vbasis:
        k = mod.algebra.weight(v)
        for w in wbasis:
            for n in mode_range(window):
                out = mod.opposite.mode(v, n, w)
                expect = sw(w) + n + 1 - k
                bad = [b for b in out.c if sw(b) != expect]
                if bad:
                    report.add("opposite_degree", False, "v^o_n W_[m] not in W_[m+n+1-wt v]",
                               {"inputs": {"v": v, "w": w, "n": n}, "lhs": fmt(sw(bad[0])), "rhs": fmt(expect)})
                    return report
    report.add("opposite_degree", True)
    return report


def check_opposite_identities(mod: Module, window: Window | None = None, sample=None, *,
                              max_wt=DEFAULT_MAX_WT, min_wt=None,
                              jacobi_window: Window | None = None) -> CheckReport:
    report = CheckReport()
    alg = mod.algebra
    if alg.kind == "plain":
        report.skip("opposite", "opposite operators need L(0) and L(1)")
        return report
    window = window or Window.symmetric(4)
    jw = jacobi_window or OPPOSITE_JACOBI_WINDOW
    vbasis, wbasis = _bases(mod, max_wt, min_wt)
    modes_n = mode_range(window)
    opp = mod.opposite
    try:
        for v in vbasis:
            l1_chain(alg, v)
    except NotLocallyNilpotent as exc:
        report.add("l1_nilpotent", False, str(exc), {"inputs": {"v": v}})
        return report
    report.add("l1_nilpotent", True, f"{len(vbasis)} vectors")
    triples = default_triples(vbasis, vbasis, wbasis, sample)
    _run_jacobi(report, "opposite_jacobi", triples, jw,
                lambda u, v, w, l, m, n: opposite_jacobi_sides(mod, u, v, w, l, m, n))
    L = mod.L
    failures = {}
    for v in vbasis:
        V = Vector.basis(v)
        Lv = {j: alg.L(j, V) for j in (-1, 0, 1)}
        for w in wbasis:
            W = Vector.basis(w)
            LW = {j: L(j, W) for j in (-1, 0, 1)}
            for n in modes_n:
                o = lambda x, q, y=W: act(opp, x, q, y)  # noqa: E731
                vw = o(V, n)
                checks = {
                    "yo_derivative": (o(Lv[-1], n), o(V, n - 1) * (-n)),
                    "sl2_opposite_1": (o(V, n, LW[1]) - L(1, vw), o(Lv[-1], n)),
                    "sl2_opposite_2": (o(V, n, LW[0]) - L(0, vw), o(Lv[0], n) + o(Lv[-1], n + 1)),
                    "sl2_opposite_3": (o(V, n, LW[-1]) - L(-1, vw),
                                       o(Lv[1], n) + o(Lv[0], n + 1) * 2 + o(Lv[-1], n + 2)),
                }
                for name, (lhs, rhs) in checks.items():
                    if name not in failures and lhs != rhs:
                        failures[name] = {"inputs": {"v": v, "w": w, "n": n}, "lhs": lhs, "rhs": rhs}
    for name in ("yo_derivative", "sl2_opposite_1", "sl2_opposite_2", "sl2_opposite_3"):
        report.add(name, name not in failures, "coefficient of x^(-n-1)", failures.get(name))
    x_conjugation_check(report, mod, wbasis)
    if alg.kind == "conformal":
        for w in wbasis:
            W = Vector.basis(w)
            for n in modes_n:
                lhs = act(opp, alg.omega, n, W)
                rhs = L(1 - n, W)
                if lhs != rhs:
                    report.add("yo_omega", False, "omega^o_n != L(1-n)",
                               {"inputs": {"w": w, "n": n}, "lhs": lhs, "rhs": rhs})
                    break
            else:
                continue
            break
        else:
            report.add("yo_omega", True, f"{len(wbasis)} vectors")
    report.extend(opposite_degree_check(mod, window, max_wt=max_wt, min_wt=min_wt))
    return report


def x_conjugation_check(report, mod: Module, wbasis, name="x_L0_conjugation"):
    """x^{L(0)} L(j) x^{-L(0)} = x^{-j} L(j): the semisimple part gives the
    monomial factor, and the nilpotent part must commute with L(j)."""
    sw = mod.space.weight
    for w in wbasis:
        W = Vector.basis(w)
        for j in (-1, 0, 1):
            out = mod.L(j, W)
            lhs = {}
            for wt, part in homogeneous_parts(out, mod.space).items():
                lhs[wt - sw(w)] = part
            rhs = {mpq(-j): out} if out.c else {}
            if lhs != rhs:
                return report.add(name, False, "x^{L(0)} L(j) x^{-L(0)} != x^{-j} L(j)",
                                  {"inputs": {"w": w, "j": j}, "lhs": str(lhs), "rhs": str(rhs)})
            N = lambda x: mod.L(0, x) - mod.L0s(x)  # noqa: E731
            lhs2, rhs2 = N(out), mod.L(j, N(W))
            if lhs2 != rhs2:
                return report.add(name, False, "L(0)-L(0)_s does not commute with L(j)",
                                  {"inputs": {"w": w, "j": j}, "lhs": lhs2, "rhs": rhs2})
    return report.add(name, True, f"{len(wbasis)} vectors")


def check_module(mod: Module, window=None, sample=None, *, max_wt=DEFAULT_MAX_WT, min_wt=None,
                 jacobi_window=None, opposite_window=None, opposite: bool = True) -> CheckReport:
    report = CheckReport()
    kw = dict(max_wt=max_wt, min_wt=min_wt)
    report.extend(check_module_axioms(mod, window, sample, jacobi_window=jacobi_window, **kw), "axioms.")
    if mod.algebra.kind != "plain":
        report.extend(weight_formula_check(mod, window, **kw), "weights.")
        report.extend(semisimple_part_check(mod, window, **kw), "semisimple.")
        report.extend(congruence_closure_check(mod, window, **kw), "weights.")
        if opposite:
            report.extend(check_opposite_identities(mod, window, sample, jacobi_window=opposite_window, **kw),
                          "opposite.")
    return report


# ---------------------------------------------------------------- contragredient


class DualCells(CellGenerator):
    """Cells of W' = (+)(W^(-b)_[n])*, enumerated from W."""

    def __init__(self, space: Space, jordan):
        self.base = space
        self._jordan = jordan
        self._lookup = lru_cache(maxsize=None)(self._compute_lookup)

    def _compute_lookup(self, bid):
        b = self.base.basis(dual_id(bid))
        return BasisVector(bid, tuple(-d for d in b.degree), b.weight, self._jordan(bid))

    def lookup(self, bid):
        return self._lookup(bid)

    def cell(self, degree, weight):
        neg = tuple(-d for d in degree)
        return tuple(sorted((self.lookup(dual_id(b.id)) for b in self.base.cell(neg, weight)),
                            key=lambda b: b.id))

    def cells(self, lo, hi):
        return [(tuple(-d for d in deg), w) for deg, w in self.base.cells(lo, hi)]

    def column_min(self, degree, weight):
        return self.base.column_min(tuple(-d for d in degree), weight)


class ContragredientModes(ModeSource):
    """v_n b* = sum over c of <b*, v^o_n c> c*, c in the cell pairing with the output."""

    def __init__(self, base: Module):
        self.base = base
        self._mode = lru_cache(maxsize=None)(self._compute)
        self._trunc = lru_cache(maxsize=None)(self._compute_trunc)

    def _source(self, v, n, bstar):
        b = self.base.space.basis(dual_id(bstar))
        alg = self.base.algebra
        deg = tuple(x - y for x, y in zip(b.degree, alg.space.degree(v)))
        return deg, b.weight + alg.weight(v) - n - 1, b.id

    def _compute(self, v, n, bstar):
        deg, wt, b = self._source(v, n, bstar)
        out = {}
        for c in self.base.space.cell(deg, wt):
            coeff = self.base.opposite.mode(v, n, c.id)[b]
            if coeff != 0:
                out[dual_id(c.id)] = coeff
        return Vector(out)

    def _compute_trunc(self, v, bstar):
        b = self.base.space.basis(dual_id(bstar))
        alg = self.base.algebra
        deg = tuple(x - y for x, y in zip(b.degree, alg.space.degree(v)))
        target = b.weight + alg.weight(v)
        lowest = self.base.space.column_min(deg, target)
        if lowest is None:
            return None
        if lowest == UNBOUNDED_BELOW:
            raise NotStronglyGraded(f"column of degree {list(deg)} has no least weight")
        return int(re_part(target - 1 - lowest))

    def mode(self, v, n, bstar):
        t = self._trunc(v, bstar)
        if t is None or n > t:
            return ZERO_VECTOR
        return self._mode(v, n, bstar)

    def trunc(self, v, bstar):
        return self._trunc(v, bstar)


def _transpose_operator(base: Module, j: int) -> Operator:
    """L'(j) = transpose of L(-j), cell by cell."""
    space = base.space

    def fn(bstar):
        b = space.basis(dual_id(bstar))
        out = {}
        for c in space.cell(b.degree, b.weight - j):
            coeff = base.L(-j, Vector.basis(c.id))[b.id]
            if coeff != 0:
                out[dual_id(c.id)] = coeff
        return Vector(out)

    return Operator(fn)


def _require_strongly_graded(mod: Module, max_wt):
    if not mod.space.lower_bounded:
        lo = -max_wt
        witness = audit_lower_truncation(mod.space, lo, max_wt)
        if witness is not None:
            raise NotStronglyGraded(f"lower truncation fails: {witness}")


def contragredient(mod: Module, max_wt=DEFAULT_MAX_WT) -> Module:
    """The contragredient module W' with ids b* dual to the ids b of W."""
    _require_strongly_graded(mod, max_wt)
    alg = mod.algebra
    if alg.kind == "plain":
        raise NotStronglyGraded("a plain vertex algebra has no opposite operators")
    sl2 = None
    if alg.kind == "mobius":
        sl2 = {j: _transpose_operator(mod, j) for j in (-1, 0, 1)}
    holder = {}

    def jordan(bstar):
        if not mod.space.generalized:
            return 0
        m = holder["module"]
        x = Vector.basis(bstar)
        wt = mod.space.weight(dual_id(bstar))
        index = -1
        while x.c:
            x = m.L(0, x) - x * wt
            index += 1
            if index > NILPOTENCE_CAP:
                raise NotLocallyNilpotent("L'(0) - n is not nilpotent")
        return index

    gen = DualCells(mod.space, jordan)
    space = Space(mod.space.rank, generator=gen, generalized=mod.space.generalized,
                  lower_bounded=mod.space.lower_bounded)
    modes = ContragredientModes(mod)
    out = Module(alg, space, modes, sl2, name=(mod.name + "'") if mod.name else "",
                 opposite_sign=mod.opposite_sign, construction={"contragredient_of": mod, "max_wt": max_wt})
    holder["module"] = out
    if mod.space.finite:
        # materialize the finite dual so it behaves like any explicit space
        basis = [gen.lookup(dual_id(b.id)) for b in mod.space.all_basis()]
        out.space = Space(mod.space.rank, basis, generalized=mod.space.generalized,
                          lower_bounded=mod.space.lower_bounded)
    return out


def compare_modules(a: Module, b: Module, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT,
                    min_wt=None, name="tables_equal") -> CheckReport:
    """Entry-for-entry comparison of the structure tables of two modules on a window."""
    report = CheckReport()
    window = window or Window.symmetric(4)
    vbasis = _ids(weight_window(a.algebra.space, max_wt, min_wt))
    abasis = _ids(weight_window(a.space, max_wt, min_wt))
    bbasis = _ids(weight_window(b.space, max_wt, min_wt))
    if abasis != bbasis:
        report.add(name, False, "different bases on the window", {"lhs": abasis, "rhs": bbasis})
        return report
    for w in abasis:
        if a.space.basis(w) != b.space.basis(w):
            report.add(name, False, "basis data differ", {"inputs": {"w": w},
                                                          "lhs": str(a.space.basis(w)), "rhs": str(b.space.basis(w))})
            return report
        for v in vbasis:
            for n in mode_range(window):
                x, y = a.modes.mode(v, n, w), b.modes.mode(v, n, w)
                if x != y:
                    report.add(name, False, "mode tables differ", {"inputs": {"v": v, "w": w, "n": n},
                                                                   "lhs": x, "rhs": y})
                    return report
        if a.algebra.kind != "plain":
            for j in (-1, 0, 1):
                x, y = a.L(j, Vector.basis(w)), b.L(j, Vector.basis(w))
                if x != y:
                    report.add(name, False, "L(j) differ", {"inputs": {"w": w, "j": j}, "lhs": x, "rhs": y})
                    return report
    report.add(name, True, f"{len(abasis)} basis vectors x {len(vbasis)} algebra vectors")
    return report


def check_contragredient(mod: Module, window=None, sample=None, *, max_wt=DEFAULT_MAX_WT, min_wt=None,
                         jacobi_window=None) -> CheckReport:
    """W' passes the module axioms, W'' = W on tables, degrees flip, and Y'
    is lower truncated."""
    report = CheckReport()
    kw = dict(max_wt=max_wt, min_wt=min_wt)
    dual = contragredient(mod, max_wt)
    report.extend(check_module_axioms(dual, window, sample, jacobi_window=jacobi_window, **kw), "dual.")
    double = contragredient(dual, max_wt)
    report.extend(compare_modules(double, mod, window, **kw, name="double_dual"))
    lo = -max_wt if min_wt is None else min_wt
    bad = None
    for b in mod.space.all_basis(lo, max_wt):
        d = dual.space.basis(dual_id(b.id))
        if d.degree != tuple(-x for x in b.degree) or d.weight != b.weight:
            bad = {"inputs": {"w": b.id}, "lhs": list(d.degree), "rhs": [-x for x in b.degree]}
            break
    report.add("degree_flip", bad is None, "(W')^(b)_[n] pairs with W^(-b)_[n]", bad)
    report.add("lower_bounded", dual.space.lower_bounded == mod.space.lower_bounded or not mod.space.lower_bounded,
               "lower bounded input gives lower bounded output",
               {"lhs": dual.space.lower_bounded, "rhs": mod.space.lower_bounded})
    return report


# ---------------------------------------------------------------- homomorphisms


class ModuleMap:
    """Grading-preserving linear map W1 -> W2 given on basis ids."""

    def __init__(self, source: Module, target: Module, fn):
        self.source = source
        self.target = target
        self.op = fn if isinstance(fn, Operator) else Operator(fn)

    def __call__(self, w: Vector) -> Vector:
        return self.op(w)


def check_homomorphism(f: ModuleMap, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT,
                       min_wt=None, name="homomorphism") -> CheckReport:
    report = CheckReport()
    window = window or Window.symmetric(4)
    src, tgt = f.source, f.target
    vbasis = _ids(weight_window(src.algebra.space, max_wt, min_wt))
    wbasis = _ids(weight_window(src.space, max_wt, min_wt))
    for w in wbasis:
        W = Vector.basis(w)
        fw = f(W)
        bad = [b for b in fw.c if tgt.space.basis(b).weight != src.space.weight(w)
               or tgt.space.basis(b).degree != src.space.degree(w)]
        if bad:
            report.add(name, False, "map does not preserve the grading", {"inputs": {"w": w}, "lhs": fw})
            return report
        for v in vbasis:
            V = Vector.basis(v)
            for n in mode_range(window):
                lhs, rhs = f(src.act(V, n, W)), tgt.act(V, n, fw)
                if lhs != rhs:
                    report.add(name, False, "f(v_n w) != v_n f(w)",
                               {"inputs": {"v": v, "w": w, "n": n}, "lhs": lhs, "rhs": rhs})
                    return report
        if src.algebra.kind != "plain":
            for j in (-1, 0, 1):
                lhs, rhs = f(src.L(j, W)), tgt.L(j, fw)
                if lhs != rhs:
                    report.add(name, False, "f(L(j)w) != L(j)f(w)",
                               {"inputs": {"w": w, "j": j}, "lhs": lhs, "rhs": rhs})
                    return report
    report.add(name, True, f"{len(wbasis)} vectors")
    return report


def dual_hom(f: ModuleMap, window: Window | None = None, *, max_wt=DEFAULT_MAX_WT, min_wt=None,
             dual_source: Module | None = None, dual_target: Module | None = None) -> ModuleMap:
    """f': W2' -> W1' with <f'(w2'), w1> = <w2', f(w1)>, verified on the window."""
    rep = check_homomorphism(f, window, max_wt=max_wt, min_wt=min_wt)
    if not rep.passed:
        raise NotAHomomorphism(rep.failures()[0].detail)
    W1, W2 = f.source, f.target
    d2 = dual_source or contragredient(W2, max_wt)
    d1 = dual_target or contragredient(W1, max_wt)

    def fn(cstar):
        c = W2.space.basis(dual_id(cstar))
        out = {}
        for b in W1.space.cell(c.degree, c.weight):
            coeff = f(Vector.basis(b.id))[c.id]
            if coeff != 0:
                out[dual_id(b.id)] = coeff
        return Vector(out)

    fp = ModuleMap(d2, d1, fn)
    rep = check_homomorphism(fp, window, max_wt=max_wt, min_wt=min_wt)
    if not rep.passed:
        raise NotAHomomorphism("the transpose fails to intertwine: " + rep.failures()[0].detail)
    return fp


def module_map_matrix(f: ModuleMap, lo, hi):
    """{(target id, source id): coeff} on the weight window, for inspection."""
    out = {}
    for b in f.source.space.all_basis(lo, hi):
        for c, x in f(Vector.basis(b.id)).c.items():
            out[(c, b.id)] = x
    return out

