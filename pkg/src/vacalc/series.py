"""Sparse formal series in finitely many named variables.

A series is a finite sum of *families*.  A family is a finite set of base
exponent vectors together with integer direction vectors; its terms are

    base + sum_i p_i * dir_i      with coefficient  c_base * coeff(p),

where p_i ranges over N ("nat") or Z ("int").  Polynomials are families with
no directions; delta(x) is the single family with base 0 and one Z-direction.
Every family is required to have finite fibres (no nonzero combination of
directions vanishes), so each coefficient is a finite sum, and every finite
window cuts a family down to finitely many terms.

Products are formed family by family; a product is refused with
UndefinedProduct when the combined directions admit a nonzero combination
summing to zero, which is exactly the case where some coefficient of the
product would be an infinite sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from gmpy2 import mpq

from .errors import (
    BothArgumentsNumeric,
    DuplicateVariable,
    UnboundedWindow,
    UndefinedProduct,
    VariableCollision,
)
from .linalg import cone_is_trivial, integer_box
from .scalar import ONE, ZERO, Gauss, binomial, fmt, im_part, is_integer, power, re_part, sort_key

Monomial = tuple  # tuple of (var, exponent) pairs, sorted by var, no zero exponents

SUPPORT_CLASSES = (
    "polynomial",
    "laurent_polynomial",
    "power_series",
    "truncated_laurent",
    "doubly_infinite",
    "complex_power",
)

DEFAULT_BOUND = 8


def monomial(mapping: Mapping | Iterable = ()) -> Monomial:
    items = mapping.items() if isinstance(mapping, Mapping) else mapping
    out = {}
    for var, e in items:
        out[var] = out.get(var, ZERO) + e
    return tuple(sorted((v, e) for v, e in out.items() if e != 0))


def mono_key(m: Monomial):
    return tuple((v, sort_key(e)) for v, e in m)


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    parts = []
    for v, e in m:
        if e == 1:
            parts.append(v)
        elif is_integer(e):
            parts.append(f"{v}^{fmt(e)}")
        else:
            parts.append(f"{v}^({fmt(e)})")
    return "*".join(parts)


@dataclass(frozen=True)
class Window:
    """Bounds on the real parts of exponents, per variable.

    Variables without an explicit bound use ``default`` (None means
    unbounded).  ``total`` optionally bounds the sum of the real parts.
    """

    bounds: tuple = ()
    default: tuple | None = (-DEFAULT_BOUND, DEFAULT_BOUND)
    total: tuple | None = None

    def __post_init__(self):
        if isinstance(self.bounds, Mapping):
            object.__setattr__(self, "bounds", tuple(sorted(self.bounds.items())))
        for var, (lo, hi) in self.bounds:
            if lo > hi:
                raise ValueError(f"empty window for {var}: [{lo}, {hi}]")

    @classmethod
    def symmetric(cls, n: int, variables: Iterable[str] = (), total=None):
        return cls(tuple((v, (-n, n)) for v in sorted(set(variables))), (-n, n), total)

    def range(self, var: str):
        for v, b in self.bounds:
            if v == var:
                return b
        return self.default

    def with_bounds(self, **bounds):
        merged = dict(self.bounds)
        merged.update(bounds)
        return Window(tuple(sorted(merged.items())), self.default, self.total)

    def contains(self, m: Monomial) -> bool:
        present = dict(m)
        for var, (lo, hi) in self.bounds:
            r = re_part(present.get(var, ZERO))
            if not lo <= r <= hi:
                return False
        if self.default is not None:
            lo, hi = self.default
            named = {v for v, _ in self.bounds}
            for var, e in m:
                if var not in named and not lo <= re_part(e) <= hi:
                    return False
        if self.total is not None:
            s = sum((re_part(e) for _, e in m), ZERO)
            if not self.total[0] <= s <= self.total[1]:
                return False
        return True


_hidden_counter = itertools.count()


def _fresh_hidden() -> str:
    return f"#{next(_hidden_counter)}"


class Family:
    """One lazily enumerated block of terms (see module docstring)."""

    __slots__ = ("vars", "bases", "dirs", "kinds", "coeff", "pins")

    def __init__(self, variables, bases, dirs=(), kinds=(), coeff=None, pins=()):
        self.vars = tuple(variables)
        self.bases = {b: c for b, c in bases.items() if not _is_zero(c)}
        self.dirs = tuple(tuple(d) for d in dirs)
        self.kinds = tuple(kinds)
        self.coeff = coeff
        self.pins = tuple(pins)  # (hidden var, required exponent)

    @property
    def finite(self) -> bool:
        return not self.dirs

    def visible(self):
        hidden = {v for v, _ in self.pins}
        return [v for v in self.vars if v not in hidden]

    def realign(self, variables):
        """Same family over a larger, sorted variable tuple."""
        if variables == self.vars:
            return self
        idx = [self.vars.index(v) if v in self.vars else None for v in variables]

        def lift(vec, zero):
            return tuple(zero if i is None else vec[i] for i in idx)

        return Family(
            variables,
            {lift(b, ZERO): c for b, c in self.bases.items()},
            [lift(d, 0) for d in self.dirs],
            self.kinds,
            self.coeff,
            self.pins,
        )

    def terms(self, window: Window):
        """Yield (monomial, coefficient) for terms inside the window."""
        hidden = dict(self.pins)
        nv, nparams = len(self.vars), len(self.dirs)
        if not self.dirs:
            for b, c in self.bases.items():
                if any(b[self.vars.index(h)] != e for h, e in hidden.items()):
                    continue
                m = tuple((v, e) for v, e in zip(self.vars, b) if e != 0 and v not in hidden)
                if window.contains(m):
                    yield m, c
            return
        coeff = self.coeff
        for b, c in self.bases.items():
            cons = []
            skip = False
            for k in range(nv):
                var = self.vars[k]
                row = tuple(d[k] for d in self.dirs)
                base_re = re_part(b[k])
                if var in hidden:
                    target = hidden[var]
                    if im_part(target) != im_part(b[k]):
                        skip = True
                        break
                    rhs = re_part(target) - base_re
                    cons.append((row, rhs))
                    cons.append((tuple(-x for x in row), -rhs))
                    continue
                if not any(row):
                    continue
                rng = window.range(var)
                if rng is None:
                    raise UnboundedWindow(f"window leaves variable {var} unbounded")
                lo, hi = rng
                cons.append((row, mpq(hi) - base_re))
                cons.append((tuple(-x for x in row), base_re - mpq(lo)))
            if skip:
                continue
            for i, kind in enumerate(self.kinds):
                if kind == "nat":
                    cons.append((tuple(-1 if j == i else 0 for j in range(nparams)), 0))
            try:
                box = integer_box(cons, nparams)
            except OverflowError:
                raise UnboundedWindow("window does not bound this series") from None
            if box is None:
                continue
            for p in itertools.product(*(range(lo, hi + 1) for lo, hi in box)):
                exps = list(b)
                for i, pi in enumerate(p):
                    if pi:
                        d = self.dirs[i]
                        for k in range(nv):
                            if d[k]:
                                exps[k] = exps[k] + pi * d[k]
                if any(exps[self.vars.index(h)] != e for h, e in hidden.items()):
                    continue
                m = tuple((v, e) for v, e in zip(self.vars, exps) if e != 0 and v not in hidden)
                if not window.contains(m):
                    continue
                val = c if coeff is None else c * coeff(p)
                if not _is_zero(val):
                    yield m, val


def _is_zero(c) -> bool:
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


def _classify(families) -> str:
    exps = [e for f in families for b in f.bases for e in b]
    integral = all(is_integer(e) for e in exps)
    if all(f.finite for f in families):
        if not integral:
            return "complex_power"
        return "polynomial" if all(e >= 0 for e in exps) else "laurent_polynomial"
    if not integral:
        return "complex_power"
    below = True
    for f in families:
        vis = {v for v in f.visible()}
        for k, var in enumerate(f.vars):
            if var not in vis:
                continue
            for d, kind in zip(f.dirs, f.kinds):
                if d[k] and (kind == "int" or d[k] < 0):
                    below = False
    if below:
        nonneg = all(e >= 0 for f in families for b in f.bases for e in b)
        return "power_series" if nonneg else "truncated_laurent"
    return "doubly_infinite"


class FormalSeries:
    """Immutable sum of families; see the module docstring."""

    __slots__ = ("families", "support_class")

    def __init__(self, families: Iterable[Family] = (), support_class: str | None = None):
        fams = []
        for f in families:
            if not f.bases:
                continue
            if f.dirs and not cone_is_trivial(f.dirs, f.kinds):
                raise UndefinedProduct("series family has an infinite fibre")
            fams.append(f)
        self.families = tuple(fams)
        self.support_class = support_class or _classify(self.families)

    # ------------------------------------------------------------ builders
    @classmethod
    def from_terms(cls, terms: Mapping | Iterable):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc = {}
        for m, c in items:
            m = monomial(m)
            acc[m] = acc[m] + c if m in acc else c
        acc = {m: c for m, c in acc.items() if not _is_zero(c)}
        variables = tuple(sorted({v for m in acc for v, _ in m}))
        bases = {}
        for m, c in acc.items():
            d = dict(m)
            bases[tuple(d.get(v, ZERO) for v in variables)] = c
        return cls([Family(variables, bases)] if bases else [])

    @classmethod
    def constant(cls, c):
        return cls.from_terms({(): c})

    @classmethod
    def var(cls, name: str, exponent=1, coeff=ONE):
        return cls.from_terms({((name, mpq(exponent) if not isinstance(exponent, Gauss) else exponent),): coeff})

    # ------------------------------------------------------------ queries
    @property
    def variables(self):
        out = set()
        for f in self.families:
            out.update(f.visible())
        return tuple(sorted(out))

    @property
    def is_finite(self) -> bool:
        return all(f.finite for f in self.families)

    def coefficients(self, window: Window | None = None) -> dict:
        """Materialize all terms in ``window`` as {monomial: coefficient}."""
        if window is None:
            window = Window(default=None)
        acc = {}
        for f in self.families:
            for m, c in f.terms(window):
                acc[m] = acc[m] + c if m in acc else c
        return {m: c for m, c in sorted(acc.items(), key=lambda kv: mono_key(kv[0])) if not _is_zero(c)}

    def coefficient(self, m) -> object:
        m = monomial(m)
        d = dict(m)
        variables = set(self.variables) | set(d)
        bounds = {v: (re_part(d.get(v, ZERO)),) * 2 for v in variables}
        w = Window(tuple(sorted(bounds.items())), default=(0, 0))
        return self.coefficients(w).get(m, ZERO)

    def equal_on(self, other: "FormalSeries", window: Window):
        """None when equal on the window, else the first differing monomial."""
        a, b = self.coefficients(window), other.coefficients(window)
        for m in sorted(set(a) | set(b), key=mono_key):
            if not _same(a.get(m), b.get(m)):
                return m
        return None

    # ------------------------------------------------------------ arithmetic
    def __add__(self, other):
        other = _coerce(other)
        return FormalSeries(self.families + other.families)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-ONE)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, c) -> "FormalSeries":
        return FormalSeries(
            [Family(f.vars, {b: v * c for b, v in f.bases.items()}, f.dirs, f.kinds, f.coeff, f.pins)
             for f in self.families]
        )

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __repr__(self):
        return f"FormalSeries<{self.support_class}, {len(self.families)} families>"

    def render(self, window: Window | None = None) -> str:
        coeffs = self.coefficients(window)
        if not coeffs:
            return "0"
        parts = []
        for m, c in coeffs.items():
            cs = str(c) if not is_scalar_like(c) else fmt(c)
            parts.append(f"({cs})*{mono_str(m)}" if m else f"({cs})")
        return " + ".join(parts)


def is_scalar_like(c) -> bool:
    return not hasattr(c, "is_zero")


def _same(a, b) -> bool:
    if a is None:
        return b is None or _is_zero(b)
    if b is None:
        return _is_zero(a)
    return _is_zero(a - b)


def _coerce(x) -> FormalSeries:
    if isinstance(x, FormalSeries):
        return x
    return FormalSeries.constant(x)


# ---------------------------------------------------------------- operations


def _merge_vars(*families):
    return tuple(sorted({v for f in families for v in f.vars}))


def _family_product(f: Family, g: Family) -> Family:
    variables = _merge_vars(f, g)
    f, g = f.realign(variables), g.realign(variables)
    bases = {}
    for b1, c1 in f.bases.items():
        for b2, c2 in g.bases.items():
            b = tuple(x + y for x, y in zip(b1, b2))
            v = c1 * c2
            bases[b] = bases[b] + v if b in bases else v
    dirs = f.dirs + g.dirs
    kinds = f.kinds + g.kinds
    if dirs and not cone_is_trivial(dirs, kinds):
        raise UndefinedProduct("a coefficient of the product is an infinite sum")
    cf, cg, nf = f.coeff, g.coeff, len(f.dirs)
    if cf is None and cg is None:
        coeff = None
    elif cg is None:
        coeff = lambda p: cf(p[:nf])  # noqa: E731
    elif cf is None:
        coeff = lambda p: cg(p[nf:])  # noqa: E731
    else:
        coeff = lambda p: cf(p[:nf]) * cg(p[nf:])  # noqa: E731
    return Family(variables, bases, dirs, kinds, coeff, f.pins + g.pins)


def multiply(f: FormalSeries, g: FormalSeries) -> FormalSeries:
    """Product of two series, or UndefinedProduct.

    The finiteness test is exact for the family descriptions: a coefficient
    of the product is a finite sum iff no nonzero combination of the joint
    directions (nonnegative on N-directions) is zero.
    """
    return FormalSeries([_family_product(a, b) for a in f.families for b in g.families])


def delta(var: str) -> FormalSeries:
    """delta(x) = sum over n in Z of x^n."""
    return FormalSeries([Family((var,), {(ZERO,): ONE}, [(1,)], ["int"])], "doubly_infinite")


def _term(t):
    """Normalize a binomial argument to (coeff, var-or-None)."""
    if isinstance(t, str):
        return ONE, t
    if isinstance(t, tuple):
        c, v = t
        return c, v
    return t, None


def binom_expand(first, second, lam) -> FormalSeries:
    """(first + second)^lam expanded in nonnegative integral powers of second.

    Each argument is a variable name, a scalar, or a pair (scalar, variable)
    standing for scalar*variable.
    """
    c1, v1 = _term(first)
    c2, v2 = _term(second)
    if v1 is None and v2 is None:
        raise BothArgumentsNumeric("binomial expansion needs a formal variable")
    if v1 is not None and v1 == v2:
        raise DuplicateVariable(f"both binomial arguments are {v1}")
    lam = lam if isinstance(lam, Gauss) else mpq(lam)
    variables = tuple(sorted(v for v in (v1, v2) if v is not None))

    def vec(e1, e2):
        d = {}
        if v1 is not None:
            d[v1] = e1
        if v2 is not None:
            d[v2] = d.get(v2, ZERO) + e2
        return tuple(d.get(v, ZERO) for v in variables)

    if is_integer(lam) and lam >= 0:
        bases = {}
        for n in range(int(lam) + 1):
            c = binomial(lam, n) * power(c1, lam - n) * power(c2, n)
            b = vec(lam - n if v1 else ZERO, mpq(n) if v2 else ZERO)
            bases[b] = bases.get(b, ZERO) + c
        return FormalSeries([Family(variables, bases)])
    if c1 != 1 and not is_integer(lam):
        raise ValueError("a non-integral power of a scaled first argument is not exact")
    lead = power(c1, lam) if is_integer(lam) else ONE
    base = vec(lam if v1 else ZERO, ZERO)
    direction = tuple(int(x) for x in vec(-1 if v1 else 0, 1 if v2 else 0))
    ratio = c2 / c1

    def coeff(p, lam=lam, ratio=ratio):
        return binomial(lam, p[0]) * power(ratio, p[0])

    return FormalSeries([Family(variables, {base: lead}, [direction], ["nat"], coeff)])


def delta_ratio(numerator, denominator) -> FormalSeries:
    """delta(numerator / denominator) with the binomial convention.

    ``numerator`` is one term or a pair of terms (first, second); the
    denominator is a single term containing a variable.  Terms are as in
    ``binom_expand``.
    """
    cd, vd = _term(denominator)
    if vd is None:
        raise ValueError("the denominator of a delta argument must contain a variable")
    if not isinstance(numerator, list):
        numerator = [numerator]
    if len(numerator) == 1:
        cn, vn = _term(numerator[0])
        if vn is None:
            raise ValueError("delta argument has no variable in the numerator")
        if vn == vd:
            raise DuplicateVariable(vn)
        variables = tuple(sorted((vn, vd)))
        d = {vn: 1, vd: -1}
        direction = tuple(d[v] for v in variables)
        ratio = cn / cd

        def coeff(p, ratio=ratio):
            return power(ratio, p[0])

        return FormalSeries(
            [Family(variables, {(ZERO, ZERO): ONE}, [direction], ["int"], coeff)], "doubly_infinite"
        )
    (c1, v1), (c2, v2) = (_term(t) for t in numerator)
    named = [v for v in (v1, v2, vd) if v is not None]
    if len(named) != len(set(named)):
        raise DuplicateVariable(", ".join(named))
    if v1 is None and v2 is None:
        raise BothArgumentsNumeric("delta numerator needs a formal variable")
    variables = tuple(sorted(named))

    def vec(**kw):
        return tuple(kw.get(v, 0) for v in variables)

    # n in Z:  first^n / den^n ; m in N: binomial index
    dn = {vd: -1}
    dm = {}
    if v1 is not None:
        dn[v1] = dn.get(v1, 0) + 1
        dm[v1] = -1
    if v2 is not None:
        dm[v2] = 1
    dir_n = tuple(dn.get(v, 0) for v in variables)
    dir_m = tuple(dm.get(v, 0) for v in variables)

    def coeff(p, c1=c1, c2=c2, cd=cd):
        n, m = p
        return binomial(mpq(n), m) * power(c1, n - m) * power(c2, m) * power(cd, -n)

    return FormalSeries(
        [Family(variables, {vec(): ONE}, [dir_n, dir_m], ["int", "nat"], coeff)], "doubly_infinite"
    )


def delta3(out_var: str, a_var: str, b_var: str, sign: int = 1) -> FormalSeries:
    """out^-1 delta((a-b)/out) for sign=+1, out^-1 delta((b-a)/(-out)) for sign=-1."""
    if len({out_var, a_var, b_var}) != 3:
        raise DuplicateVariable(f"{out_var}, {a_var}, {b_var}")
    if sign == 1:
        d = delta_ratio([a_var, (-ONE, b_var)], out_var)
    else:
        d = delta_ratio([b_var, (-ONE, a_var)], (-ONE, out_var))
    return multiply(FormalSeries.var(out_var, -1), d)


def residue(f: FormalSeries, x: str) -> FormalSeries:
    """Coefficient of x^-1, as a series in the remaining variables."""
    fams = []
    for fam in f.families:
        if x not in fam.vars or x in dict(fam.pins):
            continue
        hidden = _fresh_hidden()
        variables = tuple(hidden if v == x else v for v in fam.vars)
        order = sorted(range(len(variables)), key=lambda i: variables[i])
        fams.append(
            Family(
                tuple(variables[i] for i in order),
                {tuple(b[i] for i in order): c for b, c in fam.bases.items()},
                [tuple(d[i] for i in order) for d in fam.dirs],
                fam.kinds,
                fam.coeff,
                fam.pins + ((hidden, -ONE),),
            )
        )
    return FormalSeries(fams)


def _per_base(fam: Family):
    for b, c in fam.bases.items():
        yield b, c


def derivative(f: FormalSeries, x: str) -> FormalSeries:
    """Termwise d/dx."""
    fams = []
    for fam in f.families:
        if x not in fam.visible():
            continue
        k = fam.vars.index(x)
        if fam.finite:
            bases = {}
            for b, c in fam.bases.items():
                if b[k] != 0:
                    nb = b[:k] + (b[k] - 1,) + b[k + 1:]
                    bases[nb] = bases.get(nb, ZERO) + c * b[k]
            fams.append(Family(fam.vars, bases, pins=fam.pins))
            continue
        for b, c in _per_base(fam):
            nb = b[:k] + (b[k] - 1,) + b[k + 1:]
            dk = [d[k] for d in fam.dirs]

            def coeff(p, e0=b[k], dk=dk, inner=fam.coeff):
                e = e0 + sum(pi * di for pi, di in zip(p, dk))
                return e * (ONE if inner is None else inner(p))

            fams.append(Family(fam.vars, {nb: c}, fam.dirs, fam.kinds, coeff, fam.pins))
    return FormalSeries(fams)


def formal_taylor(f: FormalSeries, x: str, y: str) -> FormalSeries:
    """e^{y d/dx} f, term by term: sum_k C(e, k) x^(e-k) y^k for each x^e."""
    if y in f.variables:
        raise VariableCollision(f"{y} already occurs in the series")
    fams = []
    for fam in f.families:
        if x not in fam.visible():
            fams.append(fam)
            continue
        variables = tuple(sorted(fam.vars + (y,)))
        lifted = fam.realign(variables)
        kx, ky = variables.index(x), variables.index(y)
        step = tuple(-1 if i == kx else 1 if i == ky else 0 for i in range(len(variables)))
        for b, c in _per_base(lifted):
            dk = [d[kx] for d in lifted.dirs]
            nparams = len(lifted.dirs)

            def coeff(p, e0=b[kx], dk=dk, inner=lifted.coeff, n=nparams):
                e = e0 + sum(pi * di for pi, di in zip(p[:n], dk))
                val = binomial(e, p[n])
                return val if inner is None else val * inner(p[:n])

            fams.append(
                Family(variables, {b: c}, lifted.dirs + (step,), lifted.kinds + ("nat",), coeff, lifted.pins)
            )
    return FormalSeries(fams)


def substitute_binomial(f: FormalSeries, var: str, first, second) -> FormalSeries:
    """Replace var by (first + second) in a finite series, binomial convention."""
    if not f.is_finite:
        raise ValueError("substitution is only supported for finite series")
    out = FormalSeries()
    for m, c in f.coefficients().items():
        d = dict(m)
        e = d.pop(var, None)
        rest = FormalSeries.from_terms({monomial(d): c})
        if e is None:
            out = out + rest
        else:
            out = out + multiply(rest, binom_expand(first, second, e))
    return out


def evaluate(f: FormalSeries, point: Mapping, window: Window | None = None):
    """Sum of the terms of f in the window with variables replaced by scalars."""
    total = ZERO
    for m, c in f.coefficients(window).items():
        val = c
        for v, e in m:
            val = val * power(point[v], e)
        total = total + val
    return total


def series_to_json(f: FormalSeries, window: Window | None = None) -> list:
    from .scalar import to_json

    return [
        {"monomial": {v: to_json(e) for v, e in m}, "coeff": to_json(c)}
        for m, c in f.coefficients(window).items()
    ]


def series_from_json(data) -> FormalSeries:
    from .scalar import from_json

    return FormalSeries.from_terms(
        {monomial((v, from_json(e)) for v, e in item["monomial"].items()): from_json(item["coeff"]) for item in data}
    )
