"""Finite-dimensional Lie algebra modules: tensor products, intertwining maps,
contragredients and the associativity isomorphism.

Matrices are numpy object arrays of exact scalars.  Tensor bases are ordered
lexicographically, so w1 (x) w2 (x) w3 has index (i*d2 + j)*d3 + k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpq

from . import linalg
from .errors import AlgebraMismatch, InvariantViolation
from .report import CheckReport
from .scalar import ONE, ZERO, fmt, from_json, to_json


def mat(rows) -> np.ndarray:
    a = np.array([[from_json(x) if not isinstance(x, type(ONE)) else x for x in r] for r in rows], dtype=object)
    return a.reshape(len(rows), -1) if len(rows) else np.zeros((0, 0), dtype=object)


def zeros(n, m=None) -> np.ndarray:
    return np.full((n, n if m is None else m), ZERO, dtype=object)


def eye(n) -> np.ndarray:
    a = zeros(n)
    for i in range(n):
        a[i, i] = ONE
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(a, b).astype(object)


def rank(a) -> int:
    return linalg.rank([list(r) for r in a]) if a.size else 0


def inverse(a) -> np.ndarray:
    return mat(linalg.inverse([list(r) for r in a]))


def _first_diff(a, b):
    for idx in zip(*np.nonzero(a != b)):
        return tuple(int(i) for i in idx), a[idx], b[idx]
    return None


class LieAlgebra:
    """Structure constants c[i][j][k]: [e_i, e_j] = sum_k c[i][j][k] e_k."""

    def __init__(self, consts, basis=None, name="lie"):
        self.c = np.array(consts, dtype=object)
        d = self.c.shape[0]
        if self.c.shape != (d, d, d):
            raise ValueError(f"structure constants must be d x d x d, got {self.c.shape}")
        self.dim = d
        self.basis = list(basis) if basis else [f"e{i}" for i in range(d)]
        self.name = name
        self.validate()

    def bracket(self, x, y):
        """Bracket of coordinate vectors."""
        return np.einsum("i,j,ijk->k", np.array(x, dtype=object), np.array(y, dtype=object), self.c)

    def validate(self):
        d = self.dim
        for i in range(d):
            for j in range(d):
                if any(self.c[i, j, k] + self.c[j, i, k] != 0 for k in range(d)):
                    raise InvariantViolation("antisymmetry", {"pair": [self.basis[i], self.basis[j]]})
        unit = eye(d)
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    a, b, c = unit[i], unit[j], unit[k]
                    total = (self.bracket(a, self.bracket(b, c)) + self.bracket(b, self.bracket(c, a))
                             + self.bracket(c, self.bracket(a, b)))
                    if any(x != 0 for x in total):
                        raise InvariantViolation("jacobi", {"triple": [self.basis[i], self.basis[j], self.basis[k]]})

    def same(self, other) -> bool:
        return self is other or (self.dim == other.dim and bool(np.all(self.c == other.c)))


@dataclass
class LieAlgebraRep:
    """pi(e_i) as d x d matrices acting on column vectors."""

    algebra: LieAlgebra
    matrices: list
    name: str = "W"
    factors: tuple = field(default=())

    def __post_init__(self):
        self.matrices = [np.array(m, dtype=object) for m in self.matrices]
        if len(self.matrices) != self.algebra.dim:
            raise ValueError(f"need {self.algebra.dim} action matrices, got {len(self.matrices)}")
        shapes = {m.shape for m in self.matrices}
        if len(shapes) != 1 or next(iter(shapes))[0] != next(iter(shapes))[1]:
            raise ValueError(f"action matrices must be square and equal-sized, got {shapes}")

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def act(self, x) -> np.ndarray:
        """pi of a coordinate vector of the algebra."""
        out = zeros(self.dim)
        for c, m in zip(x, self.matrices):
            if c != 0:
                out = out + m * c
        return out

    def homomorphism_violation(self):
        alg = self.algebra
        for i in range(alg.dim):
            for j in range(alg.dim):
                lhs = self.act(alg.c[i, j])
                a, b = self.matrices[i], self.matrices[j]
                rhs = a.dot(b) - b.dot(a)
                diff = _first_diff(lhs, rhs)
                if diff is not None:
                    return (alg.basis[i], alg.basis[j]), diff
        return None

    def validate(self):
        bad = self.homomorphism_violation()
        if bad is not None:
            (u, v), (idx, l, r) = bad
            raise InvariantViolation("representation", {"pair": [u, v], "entry": list(idx),
                                                        "lhs": fmt(l), "rhs": fmt(r)})
        return self

    def to_json(self) -> dict:
        return {"dim": self.dim, "name": self.name,
                "action_matrices": [[[to_json(x) for x in row] for row in m] for m in self.matrices]}


# ---------------------------------------------------------------- sl(2)


def sl2() -> LieAlgebra:
    """Basis (e, f, h): [e,f] = h, [h,e] = 2e, [h,f] = -2f."""
    c = np.full((3, 3, 3), ZERO, dtype=object)
    E, F, H = 0, 1, 2
    c[E, F, H], c[F, E, H] = ONE, -ONE
    c[H, E, E], c[E, H, E] = mpq(2), mpq(-2)
    c[H, F, F], c[F, H, F] = mpq(-2), mpq(2)
    return LieAlgebra(c, ["e", "f", "h"], "sl2")


def sl2_irrep(n: int, algebra: LieAlgebra | None = None) -> LieAlgebraRep:
    """The (n+1)-dimensional irreducible module, basis v_0..v_n with h v_k = (n-2k) v_k."""
    algebra = algebra or sl2()
    d = n + 1
    e, f, h = zeros(d), zeros(d), zeros(d)
    for k in range(d):
        h[k, k] = mpq(n - 2 * k)
        if k + 1 < d:
            f[k + 1, k] = mpq(k + 1)
            e[k, k + 1] = mpq(n - k)
    return LieAlgebraRep(algebra, [e, f, h], f"V({n})").validate()


def trivial_rep(algebra: LieAlgebra, dim: int = 1) -> LieAlgebraRep:
    return LieAlgebraRep(algebra, [zeros(dim) for _ in range(algebra.dim)], "trivial")


def casimir(rep: LieAlgebraRep) -> np.ndarray:
    """h^2/2 + ef + fe for an sl(2) module in the (e, f, h) basis."""
    if rep.algebra.basis[:3] != ["e", "f", "h"]:
        raise AlgebraMismatch("casimir is defined for sl2 in the (e, f, h) basis")
    e, f, h = rep.matrices
    return h.dot(h) * mpq(1, 2) + e.dot(f) + f.dot(e)


def spins(rep: LieAlgebraRep) -> dict:
    """{j: multiplicity} from the Casimir spectrum, eigenvalue 2j(j+1).

    Every candidate j in {0, 1/2, ..., (dim-1)/2} is tested by an exact nullity;
    the nullities must account for the whole space.
    """
    C = casimir(rep)
    out = {}
    covered = 0
    for twice_j in range(rep.dim):
        j = mpq(twice_j, 2)
        lam = 2 * j * (j + 1)
        null = rep.dim - rank(C - eye(rep.dim) * lam)
        if null:
            if null % (twice_j + 1):
                raise InvariantViolation("casimir", {"spin": fmt(j), "nullity": null})
            out[Fraction(int(j.numerator), int(j.denominator))] = null // (twice_j + 1)
            covered += null
    if covered != rep.dim:
        raise InvariantViolation("casimir", {"detail": "Casimir is not diagonalizable with spin eigenvalues"})
    return out


# ---------------------------------------------------------------- maps


@dataclass
class IntertwiningMapLie:
    """A linear map from the tensor product of ``sources`` into ``target``."""

    matrix: np.ndarray
    sources: tuple
    target: LieAlgebraRep
    name: str = "I"


def tensor_rep(*reps: LieAlgebraRep, name=None) -> LieAlgebraRep:
    """Diagonal action on the tensor product (iterated, left to right)."""
    alg = reps[0].algebra
    for r in reps[1:]:
        if not alg.same(r.algebra):
            raise AlgebraMismatch(f"{reps[0].name} and {r.name} are modules for different algebras")
    mats = []
    dims = [r.dim for r in reps]
    for i in range(alg.dim):
        total = zeros(int(np.prod(dims)))
        for pos, r in enumerate(reps):
            term = np.array([[ONE]], dtype=object)
            for q, other in enumerate(reps):
                term = kron(term, r.matrices[i] if q == pos else eye(other.dim))
            total = total + term
        mats.append(total)
    label = name or "(" + " x ".join(r.name for r in reps) + ")"
    return LieAlgebraRep(alg, mats, label, tuple(reps))


def tensor_diag(W1: LieAlgebraRep, W2: LieAlgebraRep):
    """(W1 [x] W2, the canonical intertwining map), the map verified before return."""
    T = tensor_rep(W1, W2, name=f"({W1.name} [x] {W2.name})")
    box = IntertwiningMapLie(eye(T.dim), (W1, W2), T, "box")
    report = check_intertwining(box, W1, W2, T)
    if not report.passed:
        raise InvariantViolation("canonical_map", report.failures()[0].witness)
    return T, box


def check_intertwining(I, W1: LieAlgebraRep, W2: LieAlgebraRep, W3: LieAlgebraRep) -> CheckReport:
    """pi3(v) I = I (pi1(v) x 1) + I (1 x pi2(v)) for every algebra basis v."""
    report = CheckReport()
    M = I.matrix if isinstance(I, IntertwiningMapLie) else np.array(I, dtype=object)
    if M.shape != (W3.dim, W1.dim * W2.dim):
        report.add("intertwining", False, f"shape {M.shape} does not match {(W3.dim, W1.dim * W2.dim)}",
                   {"inputs": {"shape": list(M.shape)}})
        return report
    alg = W3.algebra
    for i in range(alg.dim):
        lhs = W3.matrices[i].dot(M)
        rhs = M.dot(kron(W1.matrices[i], eye(W2.dim))) + M.dot(kron(eye(W1.dim), W2.matrices[i]))
        diff = _first_diff(lhs, rhs)
        if diff is not None:
            (row, col), l, r = diff
            report.add("intertwining", False, f"fails for {alg.basis[i]}", {
                "inputs": {"element": alg.basis[i], "w1": col // W2.dim, "w2": col % W2.dim, "w3_coord": row},
                "lhs": fmt(l), "rhs": fmt(r)})
            return report
    report.add("intertwining", True, f"{alg.dim} algebra basis elements")
    return report


def check_triple_intertwining(F, W1, W2, W3, W4) -> CheckReport:
    """pi4(v) F = F(pi1(v) x 1 x 1 + 1 x pi2(v) x 1 + 1 x 1 x pi3(v))."""
    report = CheckReport()
    M = F.matrix if isinstance(F, IntertwiningMapLie) else np.array(F, dtype=object)
    T = tensor_rep(W1, W2, W3)
    for i in range(W4.algebra.dim):
        diff = _first_diff(W4.matrices[i].dot(M), M.dot(T.matrices[i]))
        if diff is not None:
            (row, col), l, r = diff
            report.add("triple_intertwining", False, f"fails for {W4.algebra.basis[i]}", {
                "inputs": {"element": W4.algebra.basis[i], "column": col, "row": row},
                "lhs": fmt(l), "rhs": fmt(r)})
            return report
    report.add("triple_intertwining", True, "all algebra basis elements")
    return report


def compose_triple(I1: IntertwiningMapLie, I2: IntertwiningMapLie) -> IntertwiningMapLie:
    """I1 o (1 x I2): W1 x (W2 x W3) -> M1 -> W4."""
    W1 = I1.sources[0]
    M = I1.matrix.dot(kron(eye(W1.dim), I2.matrix))
    return IntertwiningMapLie(M, (W1,) + tuple(I2.sources), I1.target, f"{I1.name}o(1x{I2.name})")


def contragredient_rep(W: LieAlgebraRep) -> LieAlgebraRep:
    """pi'(v) = -pi(v)^T on the dual basis."""
    return LieAlgebraRep(W.algebra, [-m.T.copy() for m in W.matrices], f"{W.name}'")


def hom_space(A: LieAlgebraRep, B: LieAlgebraRep) -> list:
    """Basis of module maps A -> B, from the linear system T pi_A(v) = pi_B(v) T."""
    a, b = A.dim, B.dim
    rows = []
    for i in range(A.algebra.dim):
        PA, PB = A.matrices[i], B.matrices[i]
        for r in range(b):
            for c in range(a):
                row = [ZERO] * (a * b)
                # (T PA)[r,c] - (PB T)[r,c]; T[p,q] is unknown p*a + q
                for k in range(a):
                    if PA[k, c] != 0:
                        row[r * a + k] += PA[k, c]
                for k in range(b):
                    if PB[r, k] != 0:
                        row[k * a + c] -= PB[r, k]
                rows.append(row)
    return [np.array(v, dtype=object).reshape(b, a) for v in linalg.nullspace(rows, a * b)]


def find_isomorphism(A: LieAlgebraRep, B: LieAlgebraRep):
    """An invertible module map A -> B, or None."""
    if A.dim != B.dim:
        return None
    basis = hom_space(A, B)
    # a generic combination is invertible if any is; try small integer combinations
    for weights in _small_combos(len(basis)):
        T = zeros(B.dim, A.dim)
        for w, m in zip(weights, basis):
            T = T + m * w
        if rank(T) == A.dim:
            return T
    return None


def _small_combos(n):
    if n == 0:
        return
    for k in range(n):
        yield [ONE if i == k else ZERO for i in range(n)]
    for s in range(2, 6):
        yield [mpq(s ** i) for i in range(n)]


# ---------------------------------------------------------------- triple duals


def mu_maps(lam, dims):
    """(mu1, mu2) for a functional lam on W1 x W2 x W3 (a vector of length d1 d2 d3).

    mu1 is d2d3 x d1: column i is lam(w1_i x . x .); mu2 is d1d2 x d3.
    """
    d1, d2, d3 = dims
    L = np.array(lam, dtype=object).reshape(d1, d2, d3)
    mu1 = L.reshape(d1, d2 * d3).T.copy()
    mu2 = L.reshape(d1 * d2, d3).copy()
    return mu1, mu2


def _box_right(W1, W2, W3):
    """w1 x w2 x w3 -> W1 [x] (W2 [x] W3) as a matrix, built from canonical maps."""
    W23, b23 = tensor_diag(W2, W3)
    W1_23, b1 = tensor_diag(W1, W23)
    return W1_23, b1.matrix.dot(kron(eye(W1.dim), b23.matrix))


def _box_left(W1, W2, W3):
    """w1 x w2 x w3 -> (W1 [x] W2) [x] W3."""
    W12, b12 = tensor_diag(W1, W2)
    W12_3, b2 = tensor_diag(W12, W3)
    return W12_3, b2.matrix.dot(kron(b12.matrix, eye(W3.dim)))


@dataclass
class Embedding:
    matrix: np.ndarray  # functional on the box product (row) -> functional on W1 x W2 x W3
    source: LieAlgebraRep  # the contragredient of the box product
    target: LieAlgebraRep  # the contragredient of the diagonal triple tensor product
    which: str


def embed_inj(which: str, W1, W2, W3) -> Embedding:
    """nu -> (w1 x w2 x w3 -> nu(w1 [x] (w2 [x] w3))) for inj1, or nu((w1 [x] w2) [x] w3) for inj2.

    On coordinate vectors this is the transpose of the composite box map.
    """
    if which == "inj1":
        boxed, B = _box_right(W1, W2, W3)
    elif which == "inj2":
        boxed, B = _box_left(W1, W2, W3)
    else:
        raise ValueError(f"unknown embedding {which!r}; expected inj1 or inj2")
    return Embedding(B.T.copy(), contragredient_rep(boxed), contragredient_rep(tensor_rep(W1, W2, W3)), which)


def check_embedding(E: Embedding) -> CheckReport:
    report = CheckReport()
    n = E.target.dim
    r = rank(E.matrix)
    report.add("isomorphism", r == n and E.matrix.shape == (n, n), f"rank {r} of {n}",
               {"inputs": {"which": E.which}, "rank": r, "dim": n})
    for i in range(E.source.algebra.dim):
        diff = _first_diff(E.matrix.dot(E.source.matrices[i]), E.target.matrices[i].dot(E.matrix))
        if diff is not None:
            report.add("module_map", False, "embedding does not intertwine the dual actions",
                       {"inputs": {"which": E.which, "element": E.source.algebra.basis[i]}, "entry": list(diff[0]),
                        "lhs": fmt(diff[1]), "rhs": fmt(diff[2])})
            return report
    report.add("module_map", True, "intertwines the contragredient actions")
    return report


def same_image(A: np.ndarray, B: np.ndarray) -> bool:
    ra, rb = rank(A), rank(B)
    return ra == rb == rank(np.hstack([A, B]))


@dataclass
class ModuleIso:
    matrix: np.ndarray
    source: LieAlgebraRep
    target: LieAlgebraRep


def associativity_iso(W1, W2, W3) -> ModuleIso:
    """(W1 [x] W2) [x] W3 -> W1 [x] (W2 [x] W3), read off from the two embeddings.

    Transposing inj2^-1 o inj1 gives the map with (w1 [x] w2) [x] w3 -> w1 [x] (w2 [x] w3);
    it is verified elementwise and as a module map before return.
    """
    J1, J2 = embed_inj("inj1", W1, W2, W3), embed_inj("inj2", W1, W2, W3)
    phi_t = inverse(J2.matrix).dot(J1.matrix)
    phi = phi_t.T.copy()
    left, BL = _box_left(W1, W2, W3)
    right, BR = _box_right(W1, W2, W3)
    iso = ModuleIso(phi, left, right)
    report = check_associativity_iso(iso, W1, W2, W3)
    if not report.passed:
        raise InvariantViolation("associativity_iso", report.failures()[0].witness)
    return iso


def check_associativity_iso(iso: ModuleIso, W1, W2, W3) -> CheckReport:
    report = CheckReport()
    _, BL = _box_left(W1, W2, W3)
    _, BR = _box_right(W1, W2, W3)
    d1, d2, d3 = W1.dim, W2.dim, W3.dim
    count = 0
    for i in range(d1):
        for j in range(d2):
            for k in range(d3):
                col = (i * d2 + j) * d3 + k
                lhs = iso.matrix.dot(BL[:, col])
                rhs = BR[:, col]
                count += 1
                if any(a != b for a, b in zip(lhs, rhs)):
                    report.add("elementwise", False, "basis triple not re-bracketed",
                               {"inputs": {"triple": [i, j, k]}, "lhs": [fmt(x) for x in lhs],
                                "rhs": [fmt(x) for x in rhs]})
                    return report
    report.add("elementwise", True, f"{count} basis triples", coverage={"triples": count})
    for a in range(iso.source.algebra.dim):
        diff = _first_diff(iso.target.matrices[a].dot(iso.matrix), iso.matrix.dot(iso.source.matrices[a]))
        if diff is not None:
            report.add("module_map", False, "not a module map", {"inputs": {"element": iso.source.algebra.basis[a]},
                                                                 "entry": list(diff[0]), "lhs": fmt(diff[1]),
                                                                 "rhs": fmt(diff[2])})
            return report
    report.add("module_map", True, "commutes with the action")
    report.add("invertible", rank(iso.matrix) == iso.matrix.shape[0], f"rank {rank(iso.matrix)}",
               {"rank": rank(iso.matrix)})
    return report


def check_coherence(W1, W2, W3, W4) -> CheckReport:
    """The two re-bracketing paths ((12)3)4 -> 1(2(34)) agree."""
    report = CheckReport()
    W12 = tensor_rep(W1, W2)
    W23 = tensor_rep(W2, W3)
    W34 = tensor_rep(W3, W4)
    d1, d4 = W1.dim, W4.dim
    # path A: ((12)3)4 -> (12)(34) -> 1(2(34))
    a1 = associativity_iso(W12, W3, W4).matrix
    a2 = associativity_iso(W1, W2, W34).matrix
    path_a = a2.dot(a1)
    # path B: ((12)3)4 -> (1(23))4 -> 1((23)4) -> 1(2(34))
    b1 = kron(associativity_iso(W1, W2, W3).matrix, eye(d4))
    b2 = associativity_iso(W1, W23, W4).matrix
    b3 = kron(eye(d1), associativity_iso(W2, W3, W4).matrix)
    path_b = b3.dot(b2).dot(b1)
    diff = _first_diff(path_a, path_b)
    report.add("coherence", diff is None, "two re-bracketing paths agree",
               None if diff is None else {"entry": list(diff[0]), "lhs": fmt(diff[1]), "rhs": fmt(diff[2])})
    return report


def check_road_map(W1, W2, W3) -> CheckReport:
    """Equal images of the two embeddings, and the induced map equals the re-bracketing."""
    report = CheckReport()
    J1, J2 = embed_inj("inj1", W1, W2, W3), embed_inj("inj2", W1, W2, W3)
    report.add("same_image", same_image(J1.matrix, J2.matrix), "inj1 and inj2 have equal images",
               {"ranks": [rank(J1.matrix), rank(J2.matrix)]})
    iso = associativity_iso(W1, W2, W3)
    # the elementwise re-bracketing, independent of the embeddings
    _, BL = _box_left(W1, W2, W3)
    _, BR = _box_right(W1, W2, W3)
    direct = BR.dot(inverse(BL))
    diff = _first_diff(iso.matrix, direct)
    report.add("induced_equals_rebracketing", diff is None, "embedding-induced map equals re-bracketing",
               None if diff is None else {"entry": list(diff[0]), "lhs": fmt(diff[1]), "rhs": fmt(diff[2])})
    return report


def factorize(F: IntertwiningMapLie, W1, W2, W3) -> tuple:
    """Write a triple intertwining map as I1 o (1 x I2) with M1 = W2 [x] W3, I2 = box, I1 = F."""
    M1, I2 = tensor_diag(W2, W3)
    I1 = IntertwiningMapLie(F.matrix.dot(kron(eye(W1.dim), inverse(I2.matrix))), (W1, M1), F.target, "I1")
    report = check_intertwining(I1, W1, M1, F.target)
    report.extend(check_intertwining(I2, W2, W3, M1), "I2.")
    recomposed = compose_triple(I1, I2)
    diff = _first_diff(recomposed.matrix, F.matrix)
    report.add("recomposed", diff is None, "I1 o (1 x I2) = F",
               None if diff is None else {"entry": list(diff[0]), "lhs": fmt(diff[1]), "rhs": fmt(diff[2])})
    report.extend(check_triple_intertwining(F, W1, W2, W3, F.target), "F.")
    return I1, I2, report


# ---------------------------------------------------------------- JSON


def lie_from_json(data: dict):
    """(algebra, [reps]) from {bracket_constants, basis?, modules: [{dim, action_matrices}]}.

    ``bracket_constants`` is a d x d x d nested list, or a list of
    [i, j, k, coeff] entries (antisymmetric partners filled in).
    """
    bc = data["bracket_constants"]
    basis = data.get("basis")
    if bc and isinstance(bc[0], list) and len(bc[0]) == 4 and not isinstance(bc[0][0], list):
        d = len(basis) if basis else 1 + max(max(e[0], e[1], e[2]) for e in bc)
        c = np.full((d, d, d), ZERO, dtype=object)
        for i, j, k, v in bc:
            c[i, j, k] = from_json(v)
            c[j, i, k] = -from_json(v)
    else:
        c = np.array([[[from_json(x) for x in row] for row in plane] for plane in bc], dtype=object)
    alg = LieAlgebra(c, basis, data.get("name", "lie"))
    reps = []
    for idx, m in enumerate(data.get("modules", [])):
        mats = [mat(a) for a in m["action_matrices"]]
        rep = LieAlgebraRep(alg, mats, m.get("name", f"W{idx + 1}"))
        if rep.dim != m["dim"]:
            raise ValueError(f"module {idx}: dim {m['dim']} does not match matrices of size {rep.dim}")
        reps.append(rep.validate())
    maps = [np.array([[from_json(x) for x in row] for row in M], dtype=object) for M in data.get("maps", [])]
    return alg, reps, maps


def lie_to_json(alg: LieAlgebra, reps, maps=()) -> dict:
    d = alg.dim
    entries = [[i, j, k, to_json(alg.c[i, j, k])] for i in range(d) for j in range(i + 1, d) for k in range(d)
               if alg.c[i, j, k] != 0]
    return {"name": alg.name, "basis": alg.basis, "bracket_constants": entries,
            "modules": [r.to_json() for r in reps],
            "maps": [[[to_json(x) for x in row] for row in M] for M in maps]}
