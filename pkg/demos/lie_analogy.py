"""The finite-dimensional sl2 picture: tensor products, contragredients, intertwiners."""
from vacalc import lie

G = lie.sl2()
V = lie.sl2_irrep(1, G)
W = lie.sl2_irrep(2, G)

print("== 1. Clebsch-Gordan ========================")
for a, b in [(1, 1), (1, 2), (2, 2), (3, 1)]:
    T = lie.tensor_rep(lie.sl2_irrep(a, G), lie.sl2_irrep(b, G))
    print(f"   V({a}) x V({b}) spins:", {str(j): m for j, m in lie.spins(T).items()})

print("== 2. contragredient ========================")
D = lie.contragredient_rep(V)
print("   V* isomorphic to V:", lie.find_isomorphism(V, D) is not None)

print("== 3. intertwining maps ========================")
T, box = lie.tensor_diag(V, V)
print("   box map intertwines:", lie.check_intertwining(box, V, V, T).passed)
print("   dim Hom(V x V, V(2)) =", len(lie.hom_space(lie.tensor_rep(V, V), W)))
print("   dim Hom(V x V, V(1)) =", len(lie.hom_space(lie.tensor_rep(V, V), V)))

print("== 4. associativity and coherence ========================")
print("   road map V, V(2), V:", lie.check_road_map(V, W, V).passed)
print("   coherence:", lie.check_coherence(V, W, V, lie.trivial_rep(G)).passed)
