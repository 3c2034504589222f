# Joint eigenbases of nested-chain Casimirs and the banded action of the
# Casimirs outside the chain.
import numpy as np

from bannai_ito import ChainAlgebra, TensorSpace, joint_eigenbasis, tridiagonal_action

np.set_printoptions(precision=4, suppress=True)

space = TensorSpace.uniform(["1/2", "1/3", "1/4"], 4)

# The chain of the identity permutation is <Gamma_12>; Gamma_123 is appended
# so that every level block is resolved.
chain = ChainAlgebra((1, 2, 3))
basis = joint_eigenbasis(space, chain, 3)
print("labels (Gamma_12, Gamma_123) on level 3:")
print(basis.labels)

# Gamma_23 and Gamma_13 act tridiagonally once the states of each Gamma_123
# block are ordered by |Gamma_12 eigenvalue|.
for op in ({2, 3}, {1, 3}):
    tri = tridiagonal_action(space, op, basis, sort_key=0)
    print(f"Gamma{sorted(op)}: off-band residual {tri.residual:.1e}, groups {tri.bounds}")
    lo, hi = tri.bounds[-1]
    print(tri.matrix()[lo:hi, lo:hi])

# Another chain: the permutation (3, 1, 2) gives <Gamma_13>.
other = joint_eigenbasis(space, ChainAlgebra((3, 1, 2)), 3)
print("labels (Gamma_13, Gamma_123):")
print(other.labels)
