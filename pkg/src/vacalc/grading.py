"""Doubly graded spaces, sparse vectors and finite models of completions.

A basis vector carries a group degree (a tuple in Z^r), a weight (a Gaussian
rational) and a position in an L(0) Jordan chain.  Spaces are either an
explicit finite basis or a generator that enumerates finite cells lazily.

Basis ids are strings.  The dual basis vector of ``b`` has id ``b*``, and
the dual of ``b*`` is ``b`` again; this is the double-dual identification
used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from gmpy2 import mpq

from .scalar import ZERO, fmt, from_json, im_part, re_part, sort_key, to_json


# returned by ``column_min`` when a column has no least weight
UNBOUNDED_BELOW = "unbounded-below"


def dual_id(bid: str) -> str:
    return bid[:-1] if bid.endswith("*") else bid + "*"


def weight_class(w):
    """Representative of w modulo Z: (fractional real part, imaginary part)."""
    r = re_part(w)
    return (r - (r.numerator // r.denominator), im_part(w))


@dataclass(frozen=True)
class BasisVector:
    id: str
    degree: tuple
    weight: object
    jordan_index: int = 0


class Vector:
    """Finite sparse linear combination of basis ids."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c = {}
        for k, v in items:
            if v != 0:
                c[k] = c[k] + v if k in c else v
        self.c = {k: v for k, v in c.items() if v != 0}

    @classmethod
    def basis(cls, bid: str, coeff=mpq(1)):
        return cls({bid: coeff})

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __iter__(self):
        return iter(sorted(self.c.items()))

    def items(self):
        return sorted(self.c.items())

    def __getitem__(self, bid):
        return self.c.get(bid, ZERO)

    def __add__(self, other):
        if isinstance(other, (int,)) and other == 0:
            return self
        out = dict(self.c)
        for k, v in other.c.items():
            nv = out.get(k, ZERO) + v
            if nv == 0:
                out.pop(k, None)
            else:
                out[k] = nv
        return _raw(out)

    __radd__ = __add__

    def __neg__(self):
        return _raw({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        if isinstance(s, Vector):
            return NotImplemented
        if s == 0:
            return _raw({})
        return _raw({k: v * s for k, v in self.c.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Vector):
            return self.c == other.c
        if other == 0:
            return not self.c
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __repr__(self):
        return f"Vector({self})"

    def __str__(self):
        if not self.c:
            return "0"
        return " + ".join(f"({fmt(v)}){k}" for k, v in sorted(self.c.items()))

    def support(self):
        return sorted(self.c)


def _raw(d) -> Vector:
    v = Vector.__new__(Vector)
    v.c = d
    return v


ZERO_VECTOR = _raw({})


def vector_to_json(v: Vector) -> dict:
    return {k: to_json(c) for k, c in sorted(v.c.items())}


def vector_from_json(data) -> Vector:
    """{id: scalar}, [[id, scalar], ...] or a bare id."""
    if isinstance(data, str):
        return Vector.basis(data)
    items = data.items() if isinstance(data, Mapping) else data
    return Vector((k, from_json(c)) for k, c in items)


def vsum(vectors: Iterable[Vector]) -> Vector:
    out = {}
    for vec in vectors:
        for k, v in vec.c.items():
            nv = out.get(k, ZERO) + v
            if nv == 0:
                out.pop(k, None)
            else:
                out[k] = nv
    return _raw(out)


class CompletionElement:
    """Element of a completion, known on finitely many weights."""

    def __init__(self, components: Mapping):
        self.components = {w: v for w, v in components.items() if not v.is_zero()}

    def is_zero(self):
        return not self.components

    def __add__(self, other):
        out = dict(self.components)
        for w, v in other.components.items():
            out[w] = out[w] + v if w in out else v
        return CompletionElement(out)

    def __sub__(self, other):
        return self + other * mpq(-1)

    def __mul__(self, s):
        return CompletionElement({w: v * s for w, v in self.components.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, CompletionElement) and self.components == other.components

    def __str__(self):
        return "; ".join(f"[{fmt(w)}] {v}" for w, v in sorted(self.components.items(), key=lambda kv: sort_key(kv[0])))


class CellGenerator:
    """Interface for lazily enumerated spaces; subclasses override all methods."""

    preset: dict | None = None

    def lookup(self, bid: str) -> BasisVector:
        raise NotImplementedError

    def cell(self, degree: tuple, weight) -> tuple:
        raise NotImplementedError

    def cells(self, lo, hi) -> list:
        """(degree, weight) pairs of nonempty cells with lo <= Re(weight) <= hi."""
        raise NotImplementedError

    def column_min(self, degree: tuple, weight):
        """Least weight congruent to ``weight`` in the degree column.

        None for an empty column, UNBOUNDED_BELOW when there is no least weight.
        """
        raise NotImplementedError


class Space:
    """A doubly graded space with finite cells."""

    def __init__(self, rank: int = 0, basis: Iterable[BasisVector] | None = None,
                 generator: CellGenerator | None = None, generalized: bool = False,
                 lower_bounded: bool | None = None):
        self.rank = rank
        self.generalized = generalized
        self.generator = generator
        if generator is None:
            self._basis = {}
            self._cells = {}
            for b in basis or ():
                if b.id in self._basis:
                    raise ValueError(f"duplicate basis id {b.id}")
                if len(b.degree) != rank:
                    raise ValueError(f"degree {b.degree} of {b.id} has wrong rank")
                self._basis[b.id] = b
                self._cells.setdefault((b.degree, b.weight), []).append(b)
            for key in self._cells:
                self._cells[key] = tuple(sorted(self._cells[key], key=lambda b: b.id))
        if lower_bounded is None:
            lower_bounded = generator is None
        self.lower_bounded = lower_bounded

    @property
    def finite(self) -> bool:
        return self.generator is None

    @property
    def zero_degree(self) -> tuple:
        return (0,) * self.rank

    def basis(self, bid: str) -> BasisVector:
        if self.generator is not None:
            return self.generator.lookup(bid)
        try:
            return self._basis[bid]
        except KeyError:
            raise KeyError(f"unknown basis id {bid!r}") from None

    def has(self, bid: str) -> bool:
        try:
            self.basis(bid)
            return True
        except (KeyError, ValueError):
            return False

    def weight(self, bid: str):
        return self.basis(bid).weight

    def degree(self, bid: str) -> tuple:
        return self.basis(bid).degree

    def cell(self, degree: tuple, weight) -> tuple:
        if self.generator is not None:
            return self.generator.cell(tuple(degree), weight)
        return self._cells.get((tuple(degree), weight), ())

    def cells(self, lo=None, hi=None) -> list:
        if self.generator is not None:
            if lo is None or hi is None:
                raise ValueError("a generated space needs a weight window")
            keys = self.generator.cells(lo, hi)
        else:
            keys = [k for k in self._cells
                    if (lo is None or re_part(k[1]) >= lo) and (hi is None or re_part(k[1]) <= hi)]
        return sorted(keys, key=lambda k: (sort_key(k[1]), k[0]))

    def all_basis(self, lo=None, hi=None) -> list:
        out = []
        for key in self.cells(lo, hi):
            out.extend(self.cell(*key))
        return out

    def column_min(self, degree: tuple, weight):
        if self.generator is not None:
            return self.generator.column_min(tuple(degree), weight)
        cls = weight_class(weight)
        ws = [w for (d, w) in self._cells if d == tuple(degree) and weight_class(w) == cls]
        return min(ws, key=re_part) if ws else None

    def weights(self, vec: Vector) -> set:
        return {self.weight(b) for b in vec.c}


def project(v, n, space: Space | None = None) -> Vector:
    """Weight-n homogeneous component of a vector or completion element."""
    if isinstance(v, CompletionElement):
        return v.components.get(n, ZERO_VECTOR)
    return _raw({k: c for k, c in v.c.items() if space.weight(k) == n})


def homogeneous_parts(v: Vector, space: Space) -> dict:
    parts = {}
    for k, c in v.c.items():
        parts.setdefault(space.weight(k), {})[k] = c
    return {w: _raw(d) for w, d in parts.items()}


def pair(wprime: Vector, w) -> object:
    """Canonical pairing of a dual vector (ids ``b*``) with a vector or completion."""
    if isinstance(w, CompletionElement):
        total = ZERO
        for comp in w.components.values():
            total = total + pair(wprime, comp)
        return total
    total = ZERO
    for k, c in wprime.c.items():
        other = w.c.get(dual_id(k))
        if other is not None:
            total = total + c * other
    return total


def congruence_decompose(space: Space, lo=None, hi=None) -> dict:
    """Basis ids grouped by weight modulo Z."""
    classes = {}
    for b in space.all_basis(lo, hi):
        classes.setdefault(weight_class(b.weight), []).append(b.id)
    return {k: sorted(v) for k, v in sorted(classes.items())}


def audit_lower_truncation(space: Space, lo, hi):
    """Check that every (degree, weight-class) column seen in [lo, hi] has a
    least weight, and (if lower bounded) each degree a least real weight.

    Returns None on success or a witness dict.
    """
    columns = {}
    for degree, weight in space.cells(lo, hi):
        key = (degree, weight_class(weight))
        if key not in columns or re_part(weight) < re_part(columns[key]):
            columns[key] = weight
    for (degree, _), lowest in sorted(columns.items(), key=lambda kv: (kv[0][0], sort_key(kv[1]))):
        declared = space.column_min(degree, lowest)
        if declared is None or declared == UNBOUNDED_BELOW:
            return {"degree": list(degree), "lowest_seen": fmt(lowest),
                    "reason": "column has no least weight"}
        if re_part(declared) > re_part(lowest):
            return {"degree": list(degree), "lowest_seen": fmt(lowest), "declared_min": fmt(declared),
                    "reason": "cell below the declared minimum"}
        if re_part(declared) >= lo and not space.cell(degree, declared):
            return {"degree": list(degree), "declared_min": fmt(declared),
                    "reason": "declared minimal cell is empty"}
    return None


def check_grading_consistency(space: Space, lo=None, hi=None):
    """Every basis vector sits in exactly one cell; returns None or a witness."""
    seen = {}
    for degree, weight in space.cells(lo, hi):
        for b in space.cell(degree, weight):
            if b.id in seen:
                return {"id": b.id, "reason": "basis vector in two cells"}
            if b.degree != degree or b.weight != weight:
                return {"id": b.id, "reason": "cell label disagrees with basis data"}
            if not space.generalized and b.jordan_index != 0:
                return {"id": b.id, "reason": "jordan_index must be 0 in an ordinary space"}
            seen[b.id] = (degree, weight)
    return None
