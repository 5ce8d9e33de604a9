"""Brute-force reference computations.

Nothing here imports vacalc: coefficients come from closed forms, explicit
sums and naive convolution over ``fractions.Fraction``.
"""

from fractions import Fraction
from itertools import product
from math import factorial


def falling(lam, k):
    out = Fraction(1)
    for i in range(k):
        out *= lam - i
    return out


def gbinom(lam, k):
    """Generalized binomial C(lam, k) by the falling factorial."""
    if k < 0:
        return Fraction(0)
    return falling(Fraction(lam), k) / factorial(k)


def as_fraction(c):
    return Fraction(int(c.numerator), int(c.denominator))


def as_dict(series, window):
    """{((var, Fraction exponent), ...): Fraction} from a vacalc series."""
    return {tuple((v, as_fraction(e)) for v, e in m): as_fraction(c)
            for m, c in series.coefficients(window).items()}


def mono(**exps):
    return tuple(sorted((v, Fraction(e)) for v, e in exps.items() if e != 0))


# ---------------------------------------------------------------- delta functions


def binomial_power(a, b, n, coeff_b, bound):
    """(a + coeff_b*b)^n in nonnegative powers of b, as {(i, j): c} with
    |exponents| <= bound."""
    out = {}
    for j in range(0, 2 * bound + 1):
        i = n - j
        if abs(i) <= bound and j <= bound:
            c = gbinom(n, j) * Fraction(coeff_b) ** j
            if c:
                out[(i, j)] = c
    return out


def x_inv_delta(out, a, b, coeff_b, bound):
    """out^-1 delta((a + coeff_b*b)/out) on the box |exponent| <= bound, summing
    n over every integer with out^(-1-n) in range."""
    res = {}
    for n in range(-bound - 1, bound + 1):
        e_out = -1 - n
        if abs(e_out) > bound:
            continue
        for (i, j), c in binomial_power(a, b, n, coeff_b, bound).items():
            res[mono(**{out: e_out, a: i, b: j})] = c
    return res


def scaled_delta(out, a, b, coeff_b, s, bound):
    """out^-1 delta((a + coeff_b*b)/(s*out)) = sum_n s^-n out^(-1-n) (a + coeff_b*b)^n."""
    res = {}
    for n in range(-bound - 1, bound + 1):
        e_out = -1 - n
        if abs(e_out) > bound:
            continue
        for (i, j), c in binomial_power(a, b, n, coeff_b, bound).items():
            res[mono(**{out: e_out, a: i, b: j})] = c * Fraction(s) ** (-n)
    return res


def three_term_sides(bound):
    """(first, second, rhs) of the three-term delta identity."""
    first = scaled_delta("x0", "x1", "x2", -1, 1, bound)
    second = scaled_delta("x0", "x2", "x1", -1, -1, bound)
    rhs = x_inv_delta("x2", "x1", "x0", -1, bound)
    return first, second, rhs


# ---------------------------------------------------------------- Taylor


def taylor_power(lam, kmax):
    """e^{y d/dx} x^lam = sum_k (lam)_k / k! x^(lam-k) y^k."""
    return {mono(x=Fraction(lam) - k, y=k): falling(Fraction(lam), k) / factorial(k)
            for k in range(kmax + 1) if falling(Fraction(lam), k) != 0}


# ---------------------------------------------------------------- rational functions


def geometric_power(t, n_terms):
    """Coefficients of (1 - u)^-t by convolving t geometric series."""
    out = [Fraction(1)] + [Fraction(0)] * (n_terms - 1)
    for _ in range(t):
        out = [sum(out[:k + 1]) for k in range(n_terms)]
    return out


def iota12(g, r, s, t, box):
    """g / (x1^r x2^s (x1 - x2)^t) expanded in nonnegative powers of x2,
    via x1^-t (1 - x2/x1)^-t and naive convolution.  Returns {(i, j): c} on box."""
    (alo, ahi), (blo, bhi) = box
    n_terms = (ahi - alo) + (bhi - blo) + 20
    geo = geometric_power(t, n_terms)
    out = {}
    for (p, q), c in g.items():
        for k, gk in enumerate(geo):
            e = (p - r - t - k, q - s + k)
            if alo <= e[0] <= ahi and blo <= e[1] <= bhi:
                out[e] = out.get(e, 0) + c * gk
    return {k: v for k, v in out.items() if v}


def iota21(g, r, s, t, box):
    """Same with x2 big: (x1 - x2)^-t = (-x2)^-t (1 - x1/x2)^-t."""
    (alo, ahi), (blo, bhi) = box
    n_terms = (ahi - alo) + (bhi - blo) + 20
    geo = geometric_power(t, n_terms)
    out = {}
    for (p, q), c in g.items():
        for k, gk in enumerate(geo):
            e = (p - r + k, q - s - t - k)
            if alo <= e[0] <= ahi and blo <= e[1] <= bhi:
                out[e] = out.get(e, 0) + c * gk * (-1) ** t
    return {k: v for k, v in out.items() if v}


def geometric_partial_sum(z1, z2, N):
    """sum_{n=0}^{N} z2^n / z1^(n+1), the order-N partial sum of i12 1/(x1 - x2)."""
    return sum(Fraction(z2) ** n / Fraction(z1) ** (n + 1) for n in range(N + 1))


# ---------------------------------------------------------------- C[t], D = t^2 d/dt


def mobius_lb_mode(k, n, m):
    """(t^k)_n t^m for Y(t^k, x) = t^k / (1 - x t)^k: the x^j coefficient,
    j = -n-1, is C(k+j-1, j) t^(k+j) (and 1 for k = 0, j = 0)."""
    j = -n - 1
    if j < 0:
        return None
    if k == 0:
        return (m, Fraction(1)) if j == 0 else None
    return (k + j + m, gbinom(k + j - 1, j))


def minus_d_mode(k, n, m):
    """Y(t^k, x) t^m = (t - x)^k t^m for D = -d/dt."""
    j = -n - 1
    if j < 0 or j > k:
        return None
    return (k - j + m, gbinom(k, j) * (-1) ** j)


def lb_sl2(j, k):
    """L(-1) = t^2 d/dt, L(0) = t d/dt, L(1) = d/dt on t^k."""
    if k == 0:
        return None
    return (k - j, Fraction(k))


def casimir_eigs_float(dims):
    """Floating-point Casimir eigenvalues of the tensor product of sl2 irreps."""
    import numpy as np

    def irrep(d):
        n = d - 1
        e, f, h = (np.zeros((d, d)) for _ in range(3))
        for i in range(d):
            h[i, i] = n - 2 * i
            if i > 0:
                e[i - 1, i] = i * (n - i + 1)
                f[i, i - 1] = 1
        return e, f, h

    mats = None
    for d in dims:
        m = irrep(d)
        if mats is None:
            mats = m
        else:
            I1, I2 = np.eye(mats[0].shape[0]), np.eye(d)
            mats = tuple(np.kron(a, I2) + np.kron(I1, b) for a, b in zip(mats, m))
    e, f, h = mats
    C = h @ h / 2 + e @ f + f @ e
    return sorted(np.linalg.eigvals(C).real)


def box(n):
    return list(product(range(-n, n + 1), repeat=2))


def yo_lb(k, m, lo):
    """Y^o(t^k, x) t^m = Y(e^{x L(1)} (-x^-2)^{L(0)} t^k, x^-1) t^m for D = t^2 d/dt,
    where L(1)^i/i! t^k = C(k, i) t^(k-i).  Returns {x exponent: {t power: coeff}}
    for exponents >= lo."""
    out = {}
    for i in range(k + 1):
        a = k - i
        js = range(0, -2 * k + i - lo + 1) if a else [0]
        for j in js:
            e = -2 * k + i - j
            if e < lo:
                continue
            c = (-1) ** k * gbinom(k, i) * (gbinom(a + j - 1, j) if a else 1)
            if c:
                slot = out.setdefault(e, {})
                slot[a + j + m] = slot.get(a + j + m, 0) + c
    return {e: {p: c for p, c in d.items() if c} for e, d in out.items() if any(d.values())}
