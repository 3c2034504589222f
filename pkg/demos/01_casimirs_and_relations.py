# Casimir operators of a three-fold osp(1,2) tensor product and the
# anticommutation relations they satisfy, all in exact rational arithmetic.
from fractions import Fraction

from bannai_ito import TensorSpace, b3_embedding_check, bi_residual, subset_casimir, verify_all
from bannai_ito.relations import omega
from bannai_ito.tensor import op_algebra

# Three lowest-weight modules with parameters 1/2, 1/3, 1/4, kept up to total degree 3.
space = TensorSpace.uniform(["1/2", "1/3", "1/4"], 3)
print(space)

# Singleton Casimirs are the site parameters; the empty one is -1/2.
for A in ({1}, {2}, {3}):
    print("Gamma", A, "on level 2 =", subset_casimir(space, A).blocks[2][0, 0], "* I")
print("Gamma {} =", subset_casimir(space, 0).blocks[0][0, 0])

# The pair Casimir Gamma_12 mixes the states of one level.
g12 = subset_casimir(space, {1, 2})
print("Gamma_12 on level 1, basis", space.level_basis(1))
for row in g12.blocks[1].to_dense():
    print("   ", [str(x) for x in row])

# Rank-one relation {G12, G23} = G13 + omega_13 with a central omega_13.
G = lambda s: subset_casimir(space, s)
lhs = op_algebra("anticommutator", [G({1, 2}), G({2, 3})])
w13 = omega(space, 1, 2, 3)
print("{G12,G23} - G13 - omega13 vanishes:", (lhs - G({1, 3}) - w13).is_zero())
print("omega13 commutes with G12:", op_algebra("commutator", [w13, G({1, 2})]).is_zero())

# The general relation for a non-contiguous pair.
print("relation for A={1,3}, B={2,3}:", bi_residual(space, {1, 3}, {2, 3}).is_zero())

# Every ordered pair of nonempty subsets at once.
report = verify_all(space)
print(f"{len(report.pairs)} ordered pairs checked, all zero: {report.passed}")

# Embedding of the rank-one algebra into four sites: K={1,2}, L={3}, M={4}.
space4 = TensorSpace.uniform(["1/2", "1/3", "1/4", "1/5"], 3)
print("embedding K={1,2}, L={3}, M={4} holds:", b3_embedding_check(space4, {1, 2}, {3}, {4}).passed)

# Changing the site parameters leaves the algebra intact.
odd = TensorSpace.uniform([Fraction(7, 3), Fraction(-1, 5), Fraction(0)], 3)
print("mu = (7/3, -1/5, 0):", verify_all(odd).passed)
