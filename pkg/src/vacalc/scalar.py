"""Exact Gaussian rationals.

Real values are plain ``gmpy2.mpq``; values with a nonzero imaginary part are
``Gauss`` instances.  Every operation returns the reduced form, so a ``Gauss``
never has a zero imaginary part and equality/hashing agree across both types.
"""

from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)


class Gauss:
    """re + im*i with rational parts and im != 0."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = mpq(re)
        self.im = mpq(im)

    def __add__(self, other):
        if isinstance(other, Gauss):
            return _make(self.re + other.re, self.im + other.im)
        try:
            return Gauss(self.re + other, self.im)
        except TypeError:
            return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Gauss(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Gauss):
            return _make(self.re * other.re - self.im * other.im,
                         self.re * other.im + self.im * other.re)
        try:
            if other == 0:
                return ZERO
            return Gauss(self.re * other, self.im * other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, Gauss):
            d = other.re * other.re + other.im * other.im
            return self * Gauss(other.re / d, -other.im / d)
        try:
            return Gauss(self.re / other, self.im / other)
        except TypeError:
            return NotImplemented

    def __rtruediv__(self, other):
        d = self.re * self.re + self.im * self.im
        return Gauss(self.re / d, -self.im / d) * other

    def __pow__(self, e):
        if int(e) != e:
            raise ValueError("only integral powers of Gaussian rationals are exact")
        e = int(e)
        base = self if e >= 0 else 1 / self
        out = ONE
        for _ in range(abs(e)):
            out = out * base
        return out

    def __eq__(self, other):
        if isinstance(other, Gauss):
            return self.re == other.re and self.im == other.im
        return False

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return True

    def conjugate(self):
        return Gauss(self.re, -self.im)

    def __repr__(self):
        return f"Gauss({self.re}, {self.im})"

    def __str__(self):
        return fmt(self)


def _make(re, im):
    if im == 0:
        return mpq(re)
    return Gauss(re, im)


def scalar(re=0, im=0):
    """Build a reduced Gaussian rational from anything mpq accepts."""
    if isinstance(re, Gauss):
        return re + scalar(0, 1) * mpq(im) if im else re
    if isinstance(re, str):
        return parse_scalar(re) + (scalar(0, 1) * mpq(im) if im else ZERO)
    return _make(mpq(re), mpq(im))


def is_scalar(x) -> bool:
    return isinstance(x, (Gauss, int)) or type(x) is type(ZERO)


def re_part(x):
    return x.re if isinstance(x, Gauss) else mpq(x)


def im_part(x):
    return x.im if isinstance(x, Gauss) else ZERO


def is_integer(x) -> bool:
    return not isinstance(x, Gauss) and mpq(x).denominator == 1


def sort_key(x):
    return (re_part(x), im_part(x))


def power(c, e):
    """c**e for a scalar c, exact only for integral e (or c == 1)."""
    if c == 1:
        return ONE
    if not is_integer(e):
        raise ValueError(f"non-integral power {fmt(e)} of the scalar {fmt(c)} is not exact")
    e = int(e)
    if isinstance(c, Gauss):
        return c ** e
    return mpq(c) ** e


@lru_cache(maxsize=None)
def binomial(lam, n: int):
    """C(lam, n) by the falling-factorial recurrence."""
    if n < 0:
        return ZERO
    if n == 0:
        return ONE
    return binomial(lam, n - 1) * (lam - (n - 1)) / n


def sign(n: int) -> int:
    """(-1)^n as an int, for any integer n."""
    return -1 if n % 2 else 1


def factorial(n: int):
    out = ONE
    for k in range(2, n + 1):
        out *= k
    return out


def fmt(x) -> str:
    """Short human-readable form, e.g. '3/4', '-1+2i', '1/2i'."""
    re, im = re_part(x), im_part(x)
    if im == 0:
        return str(re)
    imag = "i" if im == 1 else "-i" if im == -1 else f"{im}i"
    if re == 0:
        return imag
    return f"{re}{'+' if im > 0 else ''}{imag}"


def to_json(x) -> list[int]:
    re, im = re_part(x), im_part(x)
    return [int(re.numerator), int(re.denominator), int(im.numerator), int(im.denominator)]


def from_json(data):
    """Inverse of ``to_json``; also accepts ints and 'p/q' strings."""
    if isinstance(data, (list, tuple)):
        if len(data) == 4:
            return _make(mpq(data[0], data[1]), mpq(data[2], data[3]))
        if len(data) == 2:
            return mpq(data[0], data[1])
        raise ValueError(f"bad scalar encoding {data!r}")
    if isinstance(data, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(data, int):
        return mpq(data)
    if isinstance(data, str):
        return parse_scalar(data)
    raise ValueError(f"bad scalar encoding {data!r}")


def parse_scalar(text: str):
    """Parse 'a', 'a/b', 'a+bi', 'bi', 'a/b-c/di'."""
    t = text.replace(" ", "")
    if not t.endswith("i"):
        return mpq(t)
    body = t[:-1]
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut <= 0:
        re_s, im_s = "0", body
    else:
        re_s, im_s = body[:cut], body[cut:]
    if im_s in ("", "+"):
        im_s = "1"
    elif im_s == "-":
        im_s = "-1"
    return _make(mpq(re_s), mpq(im_s))
