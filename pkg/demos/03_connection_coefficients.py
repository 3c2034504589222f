# Connection coefficients between chain eigenbases: one swap at a time,
# composed along a path, checked against the three-term recurrence and used
# to transport generator actions between bases.
import numpy as np

from bannai_ito import adjacent_path, block_overlap, check_three_term, compose_path, TensorSpace
from bannai_ito.connection import BasisCache, act_in_basis, direct_action, direct_overlap, label_column
from bannai_ito.spectral import tridiagonal_action

np.set_printoptions(precision=4, suppress=True)

space = TensorSpace.uniform(["1/2", "1/3", "1/4", "1/5"], 4)
cache = BasisCache(space)
E = 3

# Swap Gamma_123 for Gamma_124 while Gamma_12 stays diagonal.
(step,) = adjacent_path((1, 2, 3, 4), (1, 2, 4, 3))
src, dst = cache.get(step.before, E), cache.get(step.after, E)
cc = block_overlap(src, dst, step)
print(f"{len(cc.blocks)} blocks, orthogonality residual {cc.orthogonality_residual():.1e}")
big = max(cc.blocks, key=lambda b: b.matrix.shape[0])
print("common labels (Gamma_12, Gamma_1234):", np.round(big.common_labels, 4))
print(big.matrix)

# The overlaps obey a three-term recurrence in the source index.
incoming = step.swapped[1]
tri = tridiagonal_action(space, incoming, src, sort_key=1)
rep = check_three_term(cc, tri, label_column(dst, incoming))
print(f"three-term residual {rep.relative:.1e}")

# Reversing all four sites takes six swaps; the composed matrix is the direct overlap.
path = adjacent_path((1, 2, 3, 4), (4, 3, 2, 1))
composed = compose_path(space, path, E, cache=cache)
direct = direct_overlap(space, (1, 2, 3, 4), (4, 3, 2, 1), E, cache=cache)
print("path", [s.position for s in path], "difference", np.abs(composed.assembled - direct.assembled).max())

# Gamma_34 is diagonal in the chain of (3, 4, 1, 2); carry it back to the first basis.
to_34 = compose_path(space, adjacent_path((1, 2, 3, 4), (3, 4, 1, 2)), E, cache=cache)
g34 = 0b1100
moved = act_in_basis(to_34, label_column(to_34.target_basis, g34))
print("transported Gamma_34 matches direct:", np.abs(moved - direct_action(space, g34, src)).max() < 1e-9)
