"""From series to rational functions and back, then the duality checks."""
import random

from gmpy2 import mpq

from vacalc import Module, Region, check_duality, check_Pz_from_module, iota_expand, reconstruct_rational
from vacalc.duality import Poly2, RationalFn, fit_window, partial_sums, random_ratfn
from vacalc.examples import build_poly_mobius_lb
from vacalc.modules import contragredient

print("== 1. a rational function and its expansions ========================")
F = RationalFn(Poly2({(0, 0): mpq(1), (1, 1): mpq(-2)}), 1, 0, 2)
print("   F =", F)
bounds = (3, 3, 3, 4)
for tag in ("i12", "i21"):
    w = fit_window(bounds, Region(tag))
    S = iota_expand(F, Region(tag), w)
    print(f"   {tag}: {len(S.coefficients(w))} nonzero coefficients, reconstructs:",
          reconstruct_rational(S, Region(tag), bounds, w) == F)

print("== 2. partial sums at a point inside |x1| > |x2| ========================")
pt = {"x1": mpq(3), "x2": mpq(1)}
for N, _, err in partial_sums(F, Region("i12"), pt, [4, 8, 16]):
    print(f"   N={N:2d}  error = {float(err):.3e}")

print("== 3. random round trips ========================")
rng = random.Random(0)
hits = 0
for k in range(20):
    region = Region(("i12", "i21", "i20", "i02")[k % 4])
    G = random_ratfn(rng, region, bounds)
    w = fit_window(bounds, region)
    hits += reconstruct_rational(iota_expand(G, region, w), region, bounds, w) == G
print("   recovered", hits, "of 20")

print("== 4. duality for the adjoint module ========================")
mod = Module.adjoint(build_poly_mobius_lb())
rep = check_duality(mod, "t^4*", "t", "t", "t", window=10)
print(rep.render_text())

print("== 5. duality for the contragredient ========================")
dual = contragredient(mod, 8)
print(check_duality(dual, "t", "t", "t", "t*", window=10).render_text())

print("== 6. P(z) at z = 1/2 ========================")
print("  ", "pass" if check_Pz_from_module(mod, mpq(1, 2), window=3, max_wt=3, sample_wt=1).passed else "FAIL")
