"""Exact linear algebra over Gaussian rationals.

Dense helpers work on lists of lists.  Pivoting is always "first nonzero entry
in the lowest-index row", so every routine is deterministic.
"""

from __future__ import annotations

from math import ceil, floor

from gmpy2 import mpq

from .scalar import ONE, ZERO, re_part

# ---------------------------------------------------------------- polyhedra


def _normalize(a, b):
    scale = max(abs(x) for x in a) if any(a) else ONE
    return tuple(x / scale for x in a), b / scale


def _eliminate(cons, j):
    pos, neg, rest = [], [], []
    for a, b in cons:
        if a[j] > 0:
            pos.append((a, b))
        elif a[j] < 0:
            neg.append((a, b))
        else:
            rest.append((a, b))
    out = dict.fromkeys(rest)
    for ap, bp in pos:
        for an, bn in neg:
            lp, ln = -an[j], ap[j]
            a = tuple(lp * x + ln * y for x, y in zip(ap, an))
            out[_normalize(a, lp * bp + ln * bn)] = None
    return list(out)


def fm_bounds(constraints, nvars: int):
    """Real bounds of each variable on {p : a.p <= b for all (a, b)}.

    Returns a list of (lo, hi) with None for an unbounded side, or None when
    the system is infeasible.  Fourier-Motzkin elimination, exact.
    """
    cons = [_normalize(tuple(mpq(x) for x in a), mpq(b)) for a, b in constraints]
    cons = list(dict.fromkeys(cons))
    bounds = []
    for k in range(nvars):
        cur = cons
        for j in range(nvars):
            if j != k:
                cur = _eliminate(cur, j)
        lo = hi = None
        for a, b in cur:
            c = a[k]
            if c > 0:
                v = b / c
                hi = v if hi is None or v < hi else hi
            elif c < 0:
                v = b / c
                lo = v if lo is None or v > lo else lo
            elif b < 0:
                return None
        if lo is not None and hi is not None and lo > hi:
            return None
        bounds.append((lo, hi))
    return bounds


def integer_box(constraints, nvars: int):
    """Integer (lo, hi) per variable, or None if empty; raises on unbounded."""
    if nvars == 0:
        for a, b in constraints:
            if b < 0:
                return None
        return []
    real = fm_bounds(constraints, nvars)
    if real is None:
        return None
    box = []
    for lo, hi in real:
        if lo is None or hi is None:
            raise OverflowError("unbounded")
        lo_i, hi_i = ceil(lo), floor(hi)
        if lo_i > hi_i:
            return None
        box.append((lo_i, hi_i))
    return box


def cone_is_trivial(dirs, kinds) -> bool:
    """True iff the only d with sum d_i dirs_i = 0 and d_i >= 0 (for 'nat') is 0.

    This is the recession cone of every fibre of the map p -> sum p_i dirs_i,
    so it decides whether all fibres are finite.
    """
    n = len(dirs)
    if n == 0:
        return True
    dim = len(dirs[0])
    cons = []
    for r in range(dim):
        row = tuple(d[r] for d in dirs)
        if any(row):
            cons.append((row, 0))
            cons.append((tuple(-x for x in row), 0))
    for i, kind in enumerate(kinds):
        if kind == "nat":
            cons.append((tuple(-1 if j == i else 0 for j in range(n)), 0))
    if not cons:
        return False
    bounds = fm_bounds(cons, n)
    return all(lo is not None and hi is not None for lo, hi in bounds)


# ---------------------------------------------------------------- dense


def row_reduce(rows):
    """Reduced row echelon form; returns (rref rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = ONE / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows) -> int:
    return len(row_reduce(rows)[1])


def nullspace(rows, ncols: int | None = None):
    """Basis of {x : rows . x = 0} as a list of column vectors."""
    if not rows:
        return [[ONE if j == i else ZERO for j in range(ncols)] for i in range(ncols)]
    ncols = len(rows[0])
    m, pivots = row_reduce(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for i, p in enumerate(pivots):
            x[p] = -m[i][f]
        basis.append(x)
    return basis


def solve(a_rows, b):
    """One solution of a x = b, or None if inconsistent."""
    aug = [list(r) + [bi] for r, bi in zip(a_rows, b)]
    ncols = len(a_rows[0]) if a_rows else 0
    m, pivots = row_reduce(aug)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for i, p in enumerate(pivots):
        x[p] = m[i][ncols]
    return x


def inverse(a_rows):
    n = len(a_rows)
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(a_rows)]
    m, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def det(a_rows):
    m = [list(r) for r in a_rows]
    n = len(m)
    out = ONE
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return ZERO
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            out = -out
        out *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return out


# ---------------------------------------------------------------- sparse


class SparseSystem:
    """Sparse exact linear system that records a certificate of inconsistency.

    Equations are added as ({unknown: coeff}, rhs, label).  ``solve`` returns
    ("feasible", solution) with free unknowns set to 0, or
    ("infeasible", {label: multiplier}) such that the combination of the
    labelled equations reads 0 = nonzero.
    """

    def __init__(self):
        self.equations = []

    def add(self, coeffs: dict, rhs, label):
        coeffs = {k: v for k, v in coeffs.items() if v != 0}
        self.equations.append((coeffs, rhs, label))

    def solve(self):
        pivots = {}  # unknown -> (row coeffs, rhs, provenance)
        order = []
        for idx, (coeffs, rhs, label) in enumerate(self.equations):
            row, b, prov = dict(coeffs), rhs, {idx: ONE}
            for u in list(order):
                if u in row:
                    f = row[u]
                    prow, pb, pprov = pivots[u]
                    for k, v in prow.items():
                        nv = row.get(k, ZERO) - f * v
                        if nv == 0:
                            row.pop(k, None)
                        else:
                            row[k] = nv
                    b = b - f * pb
                    for k, v in pprov.items():
                        nv = prov.get(k, ZERO) - f * v
                        if nv == 0:
                            prov.pop(k, None)
                        else:
                            prov[k] = nv
            if not row:
                if b != 0:
                    cert = {}
                    for k, v in sorted(prov.items()):
                        lab = self.equations[k][2]
                        cert[lab] = cert.get(lab, ZERO) + v / b
                    return "infeasible", cert
                continue
            u = min(row, key=str)
            inv = ONE / row[u]
            row = {k: v * inv for k, v in row.items()}
            b = b * inv
            prov = {k: v * inv for k, v in prov.items()}
            # keep the system fully reduced
            for w in order:
                prow, pb, pprov = pivots[w]
                if u in prow:
                    f = prow[u]
                    nrow = dict(prow)
                    for k, v in row.items():
                        nv = nrow.get(k, ZERO) - f * v
                        if nv == 0:
                            nrow.pop(k, None)
                        else:
                            nrow[k] = nv
                    nprov = dict(pprov)
                    for k, v in prov.items():
                        nv = nprov.get(k, ZERO) - f * v
                        if nv == 0:
                            nprov.pop(k, None)
                        else:
                            nprov[k] = nv
                    pivots[w] = (nrow, pb - f * b, nprov)
            pivots[u] = (row, b, prov)
            order.append(u)
        solution = {u: pivots[u][1] for u in order}
        return "feasible", solution


def is_real_integer(x) -> bool:
    return re_part(x) == x and mpq(x).denominator == 1
