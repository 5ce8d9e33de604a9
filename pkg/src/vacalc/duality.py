"""Matrix coefficients, rational functions and their region expansions.

A rational function here is g(a, b) / (a^r b^s (a + sigma*b)^t) in two named
variables: (x1, x2) with sigma = -1 for products of vertex operators and
(x0, x2) with sigma = +1 for iterates.  Region tags say which variable is
"big", i.e. which one the linear factor is expanded around:

    i12: x1 big (nonnegative powers of x2)    i21: x2 big
    i20: x2 big (nonnegative powers of x0)    i02: x0 big

Reconstruction multiplies a windowed series by the candidate denominator,
reads off the numerator on the part of the window where every product
coefficient is exact, and re-expands to confirm.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from gmpy2 import mpq

from .algebra import act, mode_range, trunc_vec
from .errors import AmbiguousFit, NoFit, PoleHit
from .grading import Vector, pair, vsum
from .modules import Module
from .report import CheckReport
from .scalar import ONE, ZERO, binomial, fmt, from_json, power, re_part, sign, to_json
from .series import FormalSeries, Window, binom_expand, multiply

# ---------------------------------------------------------------- polynomials


class Poly2:
    """Bivariate polynomial {(i, j): coeff} with i, j >= 0."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {k: v for k, v in (coeffs or {}).items() if v != 0}
        if any(i < 0 or j < 0 for i, j in self.c):
            raise ValueError("Poly2 exponents must be nonnegative")

    @classmethod
    def monomial(cls, i, j, c=ONE):
        return cls({(i, j): c})

    @classmethod
    def linear(cls, sigma):
        """a + sigma*b."""
        return cls({(1, 0): ONE, (0, 1): mpq(sigma)})

    def is_zero(self):
        return not self.c

    def degree(self):
        return max((i + j for i, j in self.c), default=-1)

    def __add__(self, other):
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out.get(k, ZERO) + v
        return Poly2(out)

    def __sub__(self, other):
        return self + other.scale(-ONE)

    def scale(self, s):
        return Poly2({k: v * s for k, v in self.c.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly2):
            return self.scale(other)
        out = {}
        for (i, j), a in self.c.items():
            for (p, q), b in other.c.items():
                k = (i + p, j + q)
                out[k] = out.get(k, ZERO) + a * b
        return Poly2(out)

    def __pow__(self, n: int):
        out = Poly2({(0, 0): ONE})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def shift(self, di, dj):
        return Poly2({(i + di, j + dj): v for (i, j), v in self.c.items()})

    def divide_monomial(self, di, dj):
        return Poly2({(i - di, j - dj): v for (i, j), v in self.c.items()})

    def min_exponents(self):
        if not self.c:
            return None
        return min(i for i, _ in self.c), min(j for _, j in self.c)

    def substitute_shift(self):
        """p(a - b, b): the change of variables x0 = x1 - x2."""
        out = Poly2()
        base = Poly2({(1, 0): ONE, (0, 1): -ONE})
        for (i, j), v in self.c.items():
            out = out + (base ** i).shift(0, j).scale(v)
        return out

    def divide_linear(self, sigma):
        """(quotient, remainder-is-zero) for division by a + sigma*b."""
        # treat as a polynomial in a with coefficients in Q[b]; root a = -sigma*b
        deg_a = max((i for i, _ in self.c), default=-1)
        rows = {i: {} for i in range(deg_a + 1)}
        for (i, j), v in self.c.items():
            rows[i][j] = v
        quotient = {}
        carry = {}
        for i in range(deg_a, 0, -1):
            coeff = dict(rows[i])
            for j, v in carry.items():
                coeff[j] = coeff.get(j, ZERO) + v
            for j, v in coeff.items():
                if v != 0:
                    quotient[(i - 1, j)] = v
            # carry = (-sigma*b) * coeff
            carry = {j + 1: -sigma * v for j, v in coeff.items() if v != 0}
        rem = dict(rows.get(0, {}))
        for j, v in carry.items():
            rem[j] = rem.get(j, ZERO) + v
        ok = all(v == 0 for v in rem.values())
        return Poly2(quotient), ok

    def evaluate(self, a, b):
        total = ZERO
        for (i, j), v in self.c.items():
            total = total + v * power(a, i) * power(b, j)
        return total

    def __str__(self):
        if not self.c:
            return "0"
        return " + ".join(f"({fmt(v)})*a^{i}*b^{j}" for (i, j), v in sorted(self.c.items()))

    __repr__ = __str__


# ---------------------------------------------------------------- rational functions


@dataclass(frozen=True)
class Region:
    tag: str

    SPECS = {
        "i12": (("x1", "x2"), -1, 0),
        "i21": (("x1", "x2"), -1, 1),
        "i20": (("x0", "x2"), 1, 1),
        "i02": (("x0", "x2"), 1, 0),
    }

    def __post_init__(self):
        if self.tag not in self.SPECS:
            raise ValueError(f"unknown region {self.tag!r}; expected one of {sorted(self.SPECS)}")

    @property
    def variables(self):
        return self.SPECS[self.tag][0]

    @property
    def sigma(self):
        return self.SPECS[self.tag][1]

    @property
    def big(self) -> int:
        """Index (0 or 1) of the variable the linear factor is expanded around."""
        return self.SPECS[self.tag][2]


class RationalFn:
    """g / (a^r b^s (a + sigma b)^t), kept with (r, s, t) minimal."""

    def __init__(self, g: Poly2, r: int = 0, s: int = 0, t: int = 0, variables=("x1", "x2"), sigma: int = -1):
        if r < 0:
            g, r = g.shift(-r, 0), 0
        if s < 0:
            g, s = g.shift(0, -s), 0
        if t < 0:
            g, t = g * (Poly2.linear(sigma) ** (-t)), 0
        if g.is_zero():
            r = s = t = 0
        while r > 0 and g.min_exponents()[0] > 0:
            g, r = g.divide_monomial(1, 0), r - 1
        while s > 0 and g.min_exponents()[1] > 0:
            g, s = g.divide_monomial(0, 1), s - 1
        while t > 0:
            q, ok = g.divide_linear(sigma)
            if not ok:
                break
            g, t = q, t - 1
        self.g, self.r, self.s, self.t = g, r, s, t
        self.variables = tuple(variables)
        self.sigma = sigma

    def key(self):
        return (self.g, self.r, self.s, self.t, self.variables, self.sigma)

    def __eq__(self, other):
        return isinstance(other, RationalFn) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def denominator(self) -> Poly2:
        return Poly2.monomial(self.r, self.s) * (Poly2.linear(self.sigma) ** self.t)

    def evaluate(self, a, b):
        den = self.denominator().evaluate(a, b)
        if den == 0:
            raise PoleHit(f"denominator vanishes at ({fmt(a)}, {fmt(b)})")
        return self.g.evaluate(a, b) / den

    def __str__(self):
        a, b = self.variables
        op = "-" if self.sigma < 0 else "+"
        return f"({self.g}) / ({a}^{self.r} {b}^{self.s} ({a}{op}{b})^{self.t})"

    __repr__ = __str__

    def to_json(self) -> dict:
        return {"g": [[i, j, to_json(v)] for (i, j), v in sorted(self.g.c.items())],
                "r": self.r, "s": self.s, "t": self.t,
                "variables": list(self.variables), "sigma": self.sigma}

    @classmethod
    def from_json(cls, data: dict) -> "RationalFn":
        g = Poly2({(int(i), int(j)): from_json(v) for i, j, v in data["g"]})
        return cls(g, data.get("r", 0), data.get("s", 0), data.get("t", 0),
                   tuple(data.get("variables", ("x1", "x2"))), data.get("sigma", -1))


def _check_region(F: RationalFn, region: Region):
    if tuple(F.variables) != region.variables or F.sigma != region.sigma:
        raise ValueError(f"region {region.tag} does not match variables {F.variables}")


def iota_terms(F: RationalFn, region: Region, length: int):
    """Direct expansion: {(i, j): coeff} with at most ``length`` + 1 terms of the
    geometric tail per numerator monomial."""
    _check_region(F, region)
    t, sigma = F.t, F.sigma
    out = {}
    for (p, q), gv in F.g.c.items():
        for n in range(0, length + 1):
            c = binomial(mpq(-t), n)
            if c == 0:
                break
            if region.big == 0:
                e = (p - F.r - t - n, q - F.s + n)
                c = c * sign(n) if sigma < 0 else c
            else:
                e = (p - F.r + n, q - F.s - t - n)
                c = c * (sign(n) if sigma < 0 else 1) * (sign(t) if sigma < 0 else 1)
            out[e] = out.get(e, ZERO) + gv * c
    return {k: v for k, v in out.items() if v != 0}


def _window_box(window: Window, variables):
    return [tuple(int(x) for x in window.range(v)) for v in variables]


def iota_expand(F: RationalFn, region: Region, window: Window) -> FormalSeries:
    """Expansion of F in the region, restricted to the window."""
    (lo0, hi0), (lo1, hi1) = _window_box(window, region.variables)
    length = (hi0 - lo0) + (hi1 - lo1) + F.t + F.g.degree() + F.r + F.s + 2
    a, b = region.variables
    terms = {((a, mpq(i)), (b, mpq(j))): c for (i, j), c in iota_terms(F, region, length).items()
             if lo0 <= i <= hi0 and lo1 <= j <= hi1}
    return FormalSeries.from_terms(terms)


def iota_expand_kernel(F: RationalFn, region: Region) -> FormalSeries:
    """The same expansion assembled from the series kernel (binomial expansion
    and products); an independent route used to cross-check ``iota_expand``."""
    _check_region(F, region)
    a, b = region.variables
    num = FormalSeries.from_terms({((a, mpq(i)), (b, mpq(j))): v for (i, j), v in F.g.c.items()})
    mono = FormalSeries.from_terms({((a, mpq(-F.r)), (b, mpq(-F.s))): ONE})
    sig = mpq(F.sigma)
    if region.big == 0:
        lin = binom_expand(a, (sig, b), -F.t)
    else:
        # (a + sigma b)^-t = sigma^t (b + sigma a)^-t since sigma = +-1
        lin = binom_expand(b, (sig, a), -F.t).scale(power(sig, F.t))
    return multiply(multiply(num, mono), lin)


def series_dict(series, variables, window: Window) -> dict:
    """{(i, j): coeff} for a FormalSeries (or pass-through for dicts)."""
    if isinstance(series, dict):
        return {k: v for k, v in series.items() if v != 0}
    a, b = variables
    out = {}
    for m, c in series.coefficients(window).items():
        d = dict(m)
        if set(d) - {a, b}:
            raise ValueError(f"series has variables outside {variables}")
        ea, eb = d.get(a, ZERO), d.get(b, ZERO)
        out[(int(ea), int(eb))] = c
    return out


def reconstruct_rational(series, region: Region, bounds, window: Window) -> RationalFn:
    """The rational function within ``bounds`` = (r, s, t, deg) whose region
    expansion matches ``series`` on the window.

    Within bounds means the canonical form has pole orders at most (r, s, t)
    and numerator degree at most deg.  Over the full denominator the numerator
    then has degree at most deg + r + s + t; it is series * denominator, read
    on the part of the window where each product coefficient only uses known
    coefficients.  ``bounds=None`` escalates through (k, k, k, 4k).
    """
    if bounds is None:
        return _escalate(series, region, window)
    r, s, t, deg = bounds
    full = deg + r + s + t
    a_lo, a_hi = window.range(region.variables[0])
    b_lo, b_hi = window.range(region.variables[1])
    a_lo, a_hi, b_lo, b_hi = int(a_lo), int(a_hi), int(b_lo), int(b_hi)
    S = series_dict(series, region.variables, window)
    sigma = region.sigma
    D = Poly2.monomial(r, s) * (Poly2.linear(sigma) ** t)
    # valid box: (i, j) with (i - p, j - q) inside the window for all (p, q) in D
    vi = (a_lo + r + t, a_hi + r)
    vj = (b_lo + s + t, b_hi + s)
    if vi[0] > 0 or vj[0] > 0 or vi[1] < full or vj[1] < full:
        raise AmbiguousFit(f"window too small for bounds {bounds}: exact product box is "
                           f"{list(vi)} x {list(vj)}, need [0,{full}]^2")
    product = {}
    for (i, j), c in S.items():
        for (p, q), d in D.c.items():
            e = (i + p, j + q)
            if vi[0] <= e[0] <= vi[1] and vj[0] <= e[1] <= vj[1]:
                product[e] = product.get(e, ZERO) + c * d
    numer = {}
    for e, c in product.items():
        if c == 0:
            continue
        if e[0] < 0 or e[1] < 0 or e[0] + e[1] > full:
            raise NoFit(f"series times denominator has a term at a^{e[0]} b^{e[1]} outside the bounds")
        numer[e] = c
    F = RationalFn(Poly2(numer), r, s, t, region.variables, sigma)
    if F.g.degree() > deg:
        raise NoFit(f"best fit {F} has numerator degree {F.g.degree()} > {deg}")
    length = (a_hi - a_lo) + (b_hi - b_lo) + t + full + 2
    expect = {k: v for k, v in iota_terms(F, region, length).items()
              if a_lo <= k[0] <= a_hi and b_lo <= k[1] <= b_hi}
    if expect != S:
        diff = sorted(set(expect) ^ set(S) | {k for k in expect if k in S and expect[k] != S[k]})
        raise NoFit(f"re-expansion differs at exponent {diff[0]}")
    return F


def _escalate(series, region, window, cap=8):
    """Bounds (k, k, k, 4k) for k = 1, 2, 4, ... until a fit or the window runs out."""
    k = 1
    last = None
    while k <= cap:
        try:
            return reconstruct_rational(series, region, (k, k, k, 4 * k), window)
        except NoFit as exc:
            last = exc
        except AmbiguousFit as exc:
            raise AmbiguousFit(f"{exc}; smaller bounds gave: {last}") from last
        k *= 2
    raise last


def fit_window(bounds, region: Region, margin: int = 2) -> Window:
    """A window large enough for ``reconstruct_rational`` with these bounds."""
    r, s, t, deg = bounds
    full = deg + r + s + t
    a, b = region.variables
    return Window(((a, (-(r + t) - margin, full + margin)), (b, (-(s + t) - margin, full + margin))))


REGIONS = ("i12", "i21", "i20", "i02")


def random_ratfn(rng: random.Random, region: Region, bounds=(3, 3, 3, 4), coeff=5) -> RationalFn:
    """A random g / (a^r b^s (a + sigma b)^t) with r, s, t and deg g within bounds."""
    r, s, t, deg = bounds
    d = rng.randint(0, deg)
    terms = {}
    for _ in range(rng.randint(1, 4)):
        i = rng.randint(0, d)
        terms[(i, rng.randint(0, d - i))] = mpq(rng.choice([c for c in range(-coeff, coeff + 1) if c]))
    return RationalFn(Poly2(terms), rng.randint(0, r), rng.randint(0, s), rng.randint(0, t),
                      region.variables, region.sigma)


def check_roundtrip(samples: int = 200, bounds=(3, 3, 3, 4), seed: int = 0) -> CheckReport:
    """Expand random rational functions in every region and reconstruct them.

    The windowed expansion is also rebuilt through the series kernel, so the
    direct coefficient formula is checked against binomial expansion and
    products.
    """
    rng = random.Random(seed)
    report = CheckReport()
    bad_fit = bad_route = None
    for k in range(samples):
        region = Region(REGIONS[k % len(REGIONS)])
        F = random_ratfn(rng, region, bounds)
        window = fit_window(bounds, region)
        S = iota_expand(F, region, window)
        if bad_route is None and S.equal_on(iota_expand_kernel(F, region), window) is not None:
            bad_route = {"inputs": {"F": str(F), "region": region.tag},
                         "monomial": str(S.equal_on(iota_expand_kernel(F, region), window))}
        if bad_fit is None:
            try:
                G = reconstruct_rational(S, region, bounds, window)
                if G != F:
                    bad_fit = {"inputs": {"F": str(F), "region": region.tag}, "lhs": str(G), "rhs": str(F)}
            except (NoFit, AmbiguousFit) as exc:
                bad_fit = {"inputs": {"F": str(F), "region": region.tag}, "detail": str(exc)}
    cov = {"samples": samples, "bounds": list(bounds), "seed": seed}
    report.add("roundtrip", bad_fit is None, "reconstruct(iota(F)) == F", bad_fit, cov)
    report.add("expansion_routes", bad_route is None, "direct expansion == kernel expansion", bad_route, cov)
    return report


def equal_as_rational(f: RationalFn, h: RationalFn):
    """f(x1, x2) == h(x1 - x2, x2), checked on cleared denominators.

    Returns None or (exponent, lhs coeff, rhs coeff) of the first difference.
    """
    # f = g / (x1^r x2^s (x1-x2)^t); h(x1-x2, x2) = k' / ((x1-x2)^r' x2^s' x1^t')
    k_sub = h.g.substitute_shift()
    lhs = f.g * Poly2.monomial(h.t, h.s) * (Poly2.linear(-1) ** h.r)
    rhs = k_sub * Poly2.monomial(f.r, f.s) * (Poly2.linear(-1) ** f.t)
    if lhs == rhs:
        return None
    for e in sorted(set(lhs.c) | set(rhs.c)):
        if lhs.c.get(e, ZERO) != rhs.c.get(e, ZERO):
            return e, lhs.c.get(e, ZERO), rhs.c.get(e, ZERO)
    return None


# ---------------------------------------------------------------- matrix coefficients

KINDS = ("product", "reversed", "iterate", "iterate_shifted")


def _vec(x) -> Vector:
    return x if isinstance(x, Vector) else Vector.basis(x)


def _exps(window: Window, var: str):
    lo, hi = window.range(var)
    return range(int(lo), int(hi) + 1)


def matrix_coeff(mod: Module, kind: str, vprime, v1, v2, v, window: Window) -> FormalSeries:
    """<v', ...> for one of the four compositions, as a windowed series."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {KINDS}")
    vp, v1, v2, v = _vec(vprime), _vec(v1), _vec(v2), _vec(v)
    alg = mod.algebra
    terms = {}
    if kind in ("product", "reversed"):
        first, fvar, second, svar = (v2, "x2", v1, "x1") if kind == "product" else (v1, "x1", v2, "x2")
        t1 = trunc_vec(mod.modes, first, v)
        if t1 is not None:
            for e_in in _exps(window, fvar):
                n = -e_in - 1
                if n > t1:
                    continue
                inner = act(mod.modes, first, n, v)
                if not inner.c:
                    continue
                t2 = trunc_vec(mod.modes, second, inner)
                for e_out in _exps(window, svar):
                    m = -e_out - 1
                    if t2 is None or m > t2:
                        continue
                    c = pair(vp, act(mod.modes, second, m, inner))
                    if c != 0:
                        terms[((fvar, mpq(e_in)), (svar, mpq(e_out)))] = c
    elif kind == "iterate":
        tk = trunc_vec(alg.modes, v1, v2)
        if tk is not None:
            for e0 in _exps(window, "x0"):
                k = -e0 - 1
                if k > tk:
                    continue
                y = act(alg.modes, v1, k, v2)
                if not y.c:
                    continue
                for e2 in _exps(window, "x2"):
                    c = pair(vp, act(mod.modes, y, -e2 - 1, v))
                    if c != 0:
                        terms[(("x0", mpq(e0)), ("x2", mpq(e2)))] = c
    else:
        # <v', Y(v1, x0+x2) Y(v2, x2) v>, (x0+x2)^(-m-1) expanded in powers of x2
        tn = trunc_vec(mod.modes, v2, v)
        if tn is not None:
            for a in _exps(window, "x0"):
                for b in _exps(window, "x2"):
                    total = ZERO
                    for j in range(0, b + 1 + tn + 1):
                        m, n = -a - 1 - j, j - b - 1
                        if n > tn:
                            break
                        inner = act(mod.modes, v2, n, v)
                        if not inner.c:
                            continue
                        c = binomial(mpq(-m - 1), j)
                        if c:
                            total = total + c * pair(vp, act(mod.modes, v1, m, inner))
                    if total != 0:
                        terms[(("x0", mpq(a)), ("x2", mpq(b)))] = total
    return FormalSeries.from_terms(terms)


def _region_window(window: Window, variables) -> Window:
    return Window(tuple((v, tuple(window.range(v))) for v in variables))


def check_duality(mod: Module, vprime, v1, v2, v, window: Window | int = 10, bounds=(3, 3, 3, 4)) -> CheckReport:
    """Rationality of products and iterates, commutativity, associativity
    f(x1,x2) = h(x1-x2,x2), and the shifted-iterate expansion."""
    report = CheckReport()
    if isinstance(window, int):
        window = Window.symmetric(window)
    inputs = {"v'": str(_vec(vprime)), "v1": str(_vec(v1)), "v2": str(_vec(v2)), "v": str(_vec(v))}
    r12, r21, r20, r02 = Region("i12"), Region("i21"), Region("i20"), Region("i02")
    w12 = _region_window(window, r12.variables)
    w02 = _region_window(window, r20.variables)
    prod = matrix_coeff(mod, "product", vprime, v1, v2, v, w12)
    try:
        f = reconstruct_rational(prod, r12, bounds, w12)
        report.add("rationality_product", True, f"f = {f}")
    except (NoFit, AmbiguousFit) as exc:
        report.add("rationality_product", False, str(exc), {"inputs": inputs})
        f = None
    rev = series_dict(matrix_coeff(mod, "reversed", vprime, v1, v2, v, w12), r12.variables, w12)
    if f is not None:
        expect = series_dict(iota_expand(f, r21, w12), r12.variables, w12)
        diff = _first_diff(expect, rev)
        report.add("commutativity", diff is None, "i21 f matches the reversed product",
                   None if diff is None else {"inputs": inputs, "monomial": f"x1^{diff[0][0]}*x2^{diff[0][1]}",
                                              "lhs": diff[1], "rhs": diff[2]})
    else:
        report.skip("commutativity", "no rational function for the product")
    it = matrix_coeff(mod, "iterate", vprime, v1, v2, v, w02)
    try:
        h = reconstruct_rational(it, r20, bounds, w02)
        report.add("rationality_iterate", True, f"h = {h}")
    except (NoFit, AmbiguousFit) as exc:
        report.add("rationality_iterate", False, str(exc), {"inputs": inputs})
        h = None
    if f is not None and h is not None:
        diff = equal_as_rational(f, h)
        report.add("associativity", diff is None, "f(x1,x2) = h(x1-x2,x2) as rational functions",
                   None if diff is None else {"inputs": inputs, "monomial": f"x1^{diff[0][0]}*x2^{diff[0][1]}",
                                              "lhs": diff[1], "rhs": diff[2]})
    else:
        report.skip("associativity", "missing f or h")
    if h is not None:
        shifted = series_dict(matrix_coeff(mod, "iterate_shifted", vprime, v1, v2, v, w02), r20.variables, w02)
        expect = series_dict(iota_expand(h, r02, w02), r20.variables, w02)
        diff = _first_diff(expect, shifted)
        report.add("iterate_shifted", diff is None, "i02 h matches <v', Y(v1,x0+x2)Y(v2,x2)v>",
                   None if diff is None else {"inputs": inputs, "monomial": f"x0^{diff[0][0]}*x2^{diff[0][1]}",
                                              "lhs": diff[1], "rhs": diff[2]})
    else:
        report.skip("iterate_shifted", "no rational function for the iterate")
    return report


def _first_diff(a: dict, b: dict):
    for k in sorted(set(a) | set(b)):
        x, y = a.get(k, ZERO), b.get(k, ZERO)
        if x != y:
            return k, x, y
    return None


# ---------------------------------------------------------------- evaluation


def eval_partial(series, assignments: dict, window: Window | None = None, ratfn: RationalFn | None = None):
    """Partial sum of the windowed series at a point (exact)."""
    if any(v == 0 for v in assignments.values()):
        raise ValueError("assigned values must be nonzero")
    if ratfn is not None:
        a, b = ratfn.variables
        ratfn.evaluate(assignments[a], assignments[b])
    coeffs = series.coefficients(window) if isinstance(series, FormalSeries) else series
    total = ZERO
    for m, c in coeffs.items():
        term = c
        for var, e in m:
            if var not in assignments:
                raise KeyError(f"no value for {var}")
            term = term * power(assignments[var], e)
        total = total + term
    return total


def partial_sums(F: RationalFn, region: Region, point: dict, orders) -> list:
    """[(N, partial sum, |error|)] where order N keeps the tail terms n <= N."""
    value = F.evaluate(point[F.variables[0]], point[F.variables[1]])
    out = []
    a, b = F.variables
    for N in orders:
        total = ZERO
        for (i, j), c in iota_terms(F, region, N).items():
            total = total + c * power(point[a], i) * power(point[b], j)
        err = total - value
        out.append((N, total, abs(re_part(err)) if re_part(err) == err else err))
    return out


# ---------------------------------------------------------------- P(z)


def pz_sides(mod: Module, z, v: str, w1: str, w2: str, l: int, m: int, lo, hi):
    """(A, B + C) of the P(z) Jacobi identity for I(w1 x w2) = Y_W(w1, z) w2,
    at x0^(-l-1) x1^(-m-1), keeping target weights in [lo, hi].

    A = sum_i (-1)^i C(l,i) z^(i-q-1) v_(l+m-i) (w1)_q w2
    B = sum_i C(m,i) z^(m-i-q-1) (v_(l+i) w1)_q w2
    C = sum_i (-1)^(l+i) C(l,i) z^(l-i-q-1) (w1)_q v_(m+i) w2
    where q runs over the modes landing in the weight range.
    """
    alg = mod.algebra
    total = alg.weight(v) + alg.weight(w1) + mod.space.weight(w2) - 2
    V, W1, W2 = Vector.basis(v), Vector.basis(w1), Vector.basis(w2)

    def q_range(shift, trunc):
        # weight of the result is total - shift - q
        q_lo = int(re_part(total - shift) - hi)
        q_hi = min(int(re_part(total - shift) - lo), trunc)
        return range(q_lo, q_hi + 1)

    lhs = []
    t_w = mod.modes.trunc(w1, w2)
    if t_w is not None:
        i = 0
        while l < 0 or i <= l:
            p = l + m - i
            qs = q_range(p, t_w)
            if not qs and l < 0:
                break
            c = binomial(mpq(l), i) * sign(i)
            for q in qs:
                inner = mod.modes.mode(w1, q, w2)
                if inner.c:
                    lhs.append(act(mod.modes, V, p, inner) * (c * power(z, i - q - 1)))
            i += 1
    rhs = []
    t_v = alg.modes.trunc(v, w1)
    if t_v is not None:
        top = t_v - l if m < 0 else min(t_v - l, m)
        for i in range(0, top + 1):
            y = alg.modes.mode(v, l + i, w1)
            c = binomial(mpq(m), i)
            if not y.c or not c:
                continue
            for q in q_range(l + i, trunc_vec(mod.modes, y, W2)):
                rhs.append(act(mod.modes, y, q, W2) * (c * power(z, m - i - q - 1)))
    t_vw = mod.modes.trunc(v, w2)
    if t_vw is not None:
        top = t_vw - m if l < 0 else min(t_vw - m, l)
        for i in range(0, top + 1):
            inner = mod.modes.mode(v, m + i, w2)
            c = binomial(mpq(l), i) * sign(l + i)
            if not inner.c or not c:
                continue
            t_in = trunc_vec(mod.modes, W1, inner)
            if t_in is None:
                continue
            for q in q_range(m + i, t_in):
                rhs.append(act(mod.modes, W1, q, inner) * (c * power(z, l - i - q - 1)))

    def keep(vec):
        return Vector({k: c for k, c in vec.c.items() if lo <= re_part(mod.space.weight(k)) <= hi})

    return keep(vsum(lhs)), keep(vsum(rhs))


def check_Pz_from_module(mod: Module, z, v=None, w1=None, w2=None, window: Window | int = 6, *,
                         max_wt=6, sample_wt=3) -> CheckReport:
    """The P(z)-intertwining Jacobi identity for I(w1 x w2) = Y_W(w1, z) w2,
    coefficientwise in (x0, x1), keeping target weights in [-max_wt, max_wt].

    Unspecified arguments range over basis vectors of weight in
    [-sample_wt, sample_wt].
    """
    report = CheckReport()
    z = mpq(z)
    if not z > 0:
        raise ValueError("z must be a positive rational")
    if isinstance(window, int):
        window = Window.symmetric(window)
    alg = mod.algebra
    vs = [v] if v is not None else [b.id for b in alg.space.all_basis(-sample_wt, sample_wt)]
    w1s = [w1] if w1 is not None else [b.id for b in alg.space.all_basis(-sample_wt, sample_wt)]
    w2s = [w2] if w2 is not None else [b.id for b in mod.space.all_basis(-sample_wt, sample_wt)]
    count = nonzero = 0
    for a, b, c in itertools.product(vs, w1s, w2s):
        for l in mode_range(window, "x0"):
            for m in mode_range(window, "x1"):
                lhs, rhs = pz_sides(mod, z, a, b, c, l, m, -max_wt, max_wt)
                count += 1
                nonzero += bool(lhs.c)
                if lhs != rhs:
                    report.add("pz_jacobi", False, "P(z) Jacobi coefficient mismatch", {
                        "inputs": {"v": a, "w1": b, "w2": c, "z": fmt(z)},
                        "monomial": f"x0^{-l - 1}*x1^{-m - 1}", "lhs": lhs, "rhs": rhs})
                    return report
    report.add("pz_jacobi", True, f"z={fmt(z)}: {count} coefficients ({nonzero} nonzero)",
               coverage={"coefficients": count, "nonzero": nonzero})
    return report
