import itertools
import math

import numpy as np
import pytest

from bannai_ito.connection import chain_containing
from bannai_ito.relations import commutes_trivially
from bannai_ito.spectral import (
    ChainAlgebra,
    DegeneracyError,
    GaugeError,
    ShapeError,
    eigen_residual,
    joint_eigenbasis,
    normalized_block,
    sign_convention,
    tridiagonal_action,
    _weight_sq,
)
from bannai_ito.tensor import TensorSpace, all_subsets, op_algebra, subset_casimir, subset_mask

Y3 = ChainAlgebra((1, 2, 3))


def test_chain_generators():
    chain = ChainAlgebra((3, 1, 4, 2))
    assert chain.generators == (subset_mask({1, 3}), subset_mask({1, 3, 4}))
    assert chain.label_subsets[-1] == 0b1111
    with pytest.raises(ValueError):
        ChainAlgebra((1, 1, 2))


def test_normalized_block_pair_example():
    space = TensorSpace.uniform(["1/2", "1/2"], 2)
    np.testing.assert_array_equal(normalized_block(space, {1, 2}, 1), [[-0.5, 2.0], [2.0, -0.5]])


def test_normalized_block_scalar(space3):
    np.testing.assert_allclose(normalized_block(space3, {2}, 3), np.eye(10) / 3, rtol=0, atol=1e-15)


@pytest.mark.parametrize("A", all_subsets(3))
@pytest.mark.parametrize("E", [1, 2, 3, 4])
def test_normalized_block_symmetric(space3, A, E):
    M = normalized_block(space3, A, E)
    assert np.max(np.abs(M - M.T)) < 1e-12 * max(1.0, np.abs(M).max())


def test_gauge_requires_mu_above_minus_half():
    space = TensorSpace.uniform(["1/2", "-1/2"], 2)
    with pytest.raises(GaugeError):
        normalized_block(space, {1, 2}, 1)
    with pytest.raises(GaugeError):
        joint_eigenbasis(space, ChainAlgebra((1, 2)), 1)


def test_pair_spectrum():
    space = TensorSpace.uniform(["1/2", "1/2"], 2)
    basis = joint_eigenbasis(space, ChainAlgebra((1, 2)), 1)
    assert sorted(basis.labels[:, 0]) == pytest.approx([-2.5, 1.5], abs=1e-10)


def test_one_dimensional_blocks(space3):
    single = TensorSpace.uniform(["2/3"], 3)
    b = joint_eigenbasis(single, ChainAlgebra((1,)), 2)
    assert b.labels[0, 0] == pytest.approx(2 / 3)
    np.testing.assert_array_equal(b.vectors, [[1.0]])
    b0 = joint_eigenbasis(space3, Y3, 0)
    np.testing.assert_array_equal(b0.vectors, [[1.0]])


def test_three_site_labels_distinct(space3):
    b = joint_eigenbasis(space3, Y3, 2)
    assert b.size == 6
    assert len({tuple(np.round(l, 6)) for l in b.labels}) == 6


def test_eigenvectors_against_exact_blocks(space3):
    # back in the monomial gauge, the exact rational blocks must reproduce the labels
    E = 2
    b = joint_eigenbasis(space3, Y3, E)
    d = np.array([math.sqrt(_weight_sq(space3, m)) for m in space3.level_basis(E)])
    for g, A in enumerate(Y3.label_subsets):
        exact = subset_casimir(space3, A).blocks[E].to_float()
        U = b.vectors / d[:, None]
        np.testing.assert_allclose(exact @ U, U * b.labels[:, g], atol=1e-10)


@pytest.mark.parametrize("perm", [(1, 2, 3, 4), (3, 1, 4, 2), (4, 3, 2, 1)])
def test_eigenbasis_properties(space4_small, perm):
    chain = ChainAlgebra(perm)
    b = joint_eigenbasis(space4_small, chain, 3)
    V = b.vectors
    assert np.max(np.abs(V.T @ V - np.eye(b.size))) < 1e-12
    assert eigen_residual(space4_small, b) < 1e-10
    for g, A in enumerate(chain.label_subsets):
        M = normalized_block(space4_small, A, 3)
        assert np.max(np.abs(V @ np.diag(b.labels[:, g]) @ V.T - M)) < 1e-10
    np.testing.assert_array_equal(sign_convention(V), V)
    assert len({tuple(np.round(l, 6)) for l in b.labels}) == b.size


def test_sign_convention_ties_take_lowest_index():
    v = np.array([[-0.5], [0.5], [0.1]])
    np.testing.assert_array_equal(sign_convention(v), [[0.5], [-0.5], [-0.1]])


def test_unresolved_cluster_is_an_error(space3):
    with pytest.raises(DegeneracyError):
        joint_eigenbasis(space3, Y3, 2, tol=1e3)


@pytest.mark.parametrize("E", [2, 3, 4])
@pytest.mark.parametrize("op", [{1, 3}, {2, 3}])
def test_tridiagonal_in_pair_basis(space3, E, op):
    b = joint_eigenbasis(space3, Y3, E)
    tri = tridiagonal_action(space3, op, b, 0)
    assert tri.residual < 1e-9 * tri.norm
    # bands really are populated inside each group
    lo, hi = tri.bounds[-1]
    assert np.all(np.abs(tri.upper[lo:hi - 1]) > 1e-3)


def test_chain_generator_is_diagonal(space3):
    b = joint_eigenbasis(space3, Y3, 3)
    tri = tridiagonal_action(space3, {1, 2}, b, 0)
    assert np.max(np.abs(tri.upper), initial=0) < 1e-10
    assert np.max(np.abs(tri.lower), initial=0) < 1e-10
    np.testing.assert_allclose(tri.diagonal, tri.basis.labels[:, 0], atol=1e-10)


def test_non_adjacent_operator_is_rejected(space4_small):
    b = joint_eigenbasis(space4_small, ChainAlgebra((1, 2, 3, 4)), 3)
    with pytest.raises(ShapeError):
        tridiagonal_action(space4_small, {2, 4}, b, 0)


def test_tridiagonal_action_matrix_is_symmetric(space3):
    tri = tridiagonal_action(space3, {2, 3}, joint_eigenbasis(space3, Y3, 3), 0)
    np.testing.assert_allclose(tri.upper, tri.lower, atol=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_chains_abelian_and_maximal(n):
    space = TensorSpace.uniform(["1/2", "1/3", "1/4", "1/5", "1/7"][:n], 3)
    rng = np.random.default_rng(n)
    perms = [tuple(range(1, n + 1))] + [tuple(int(x) + 1 for x in rng.permutation(n)) for _ in range(2)]
    full = space.full_mask
    for perm in perms:
        chain = ChainAlgebra(perm)
        gens = chain.generators
        assert all(gens[i] & gens[i + 1] == gens[i] for i in range(len(gens) - 1))
        for A, B in itertools.combinations(gens, 2):
            assert commutes_trivially(A, B)
            assert op_algebra("commutator", [subset_casimir(space, A), subset_casimir(space, B)]).is_zero()
        for A in all_subsets(n):
            if A in gens or A == full or bin(A).count("1") == 1:
                continue
            assert any(not op_algebra("commutator", [subset_casimir(space, A), subset_casimir(space, G)]).is_zero()
                       for G in gens), (perm, A)


def test_chain_containing():
    assert ChainAlgebra(chain_containing(4, subset_mask({2, 4}))).generators[0] == subset_mask({2, 4})
