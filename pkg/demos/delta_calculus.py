"""Formal delta calculus on finite windows, step by step."""
from gmpy2 import mpq

from vacalc.series import mono_str

from vacalc import (Window, binom_expand, delta, delta3, derivative, evaluate_text, formal_taylor, residue,
                    verify_delta_identity)

W = Window.symmetric(4)

print("== 1. binomial expansions ========================")
f = binom_expand("x", "y", -1)
print("   (x + y)^-1, expanded in nonnegative powers of y:")
for mono, c in sorted(f.coefficients(Window.symmetric(3)).items()):
    print("     ", mono_str(mono), c)

print("== 2. the delta function ========================")
d = delta("z")
print("   delta(z) on [-3, 3]:", ", ".join(mono_str(m) for m in sorted(d.coefficients(Window.symmetric(3)))))

print("== 3. the three-term delta, residue in x0 ========================")
t = delta3("x0", "x1", "x2")
r = residue(evaluate_text("x0^-1") * t, "x0")
print("   Res_x0 x0^-1 delta3(x0; x1, x2):", {mono_str(m): str(c) for m, c in r.coefficients(W).items()})

print("== 4. derivative and Taylor ========================")
g = evaluate_text("x^3 + 2 * x")
print("   d/dx(x^3 + 2x):", {mono_str(m): str(c) for m, c in derivative(g, "x").coefficients(W).items()})
T = formal_taylor(evaluate_text("x^-1"), "x", "y")
ok = T.equal_on(binom_expand("x", "y", mpq(-1)), W) is None
print("   e^{y d/dx} x^-1 == (x + y)^-1 on the window:", ok)

print("== 5. identities ========================")
for kind in ("two_term", "three_term", "three_term_lhs_inequality", "substitution"):
    rep = verify_delta_identity(kind, Window.symmetric(8))
    print(f"   {kind:28s}", "pass" if rep.passed else "FAIL")
