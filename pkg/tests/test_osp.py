from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bannai_ito.linalg import SparseRatMatrix, bracket
from bannai_ito.osp import ModuleSpec, build_site, casimir_single, verify_osp_relations, weight_coeff

mus = st.fractions(min_value=-3, max_value=3, max_denominator=9)


def coeffs_by_recurrence(mu, count):
    # c_0 = 0, c_n + c_{n+1} = 2 (n + mu + 1/2)
    c = [Fraction(0)]
    for n in range(count - 1):
        c.append(2 * (n + mu + Fraction(1, 2)) - c[-1])
    return c


def test_weight_coeff_lowest_weight():
    assert weight_coeff(0, Fraction(7, 3)) == 0


def test_weight_coeff_hand_values():
    half = Fraction(1, 2)
    assert [weight_coeff(n, half) for n in (1, 2, 3)] == [2, 2, 4]


@given(mus)
def test_weight_coeff_solves_recurrence(mu):
    assert [weight_coeff(n, mu) for n in range(10)] == coeffs_by_recurrence(mu, 10)


@given(mus, st.integers(0, 20))
def test_weight_coeff_even_is_mu_independent(mu, k):
    assert weight_coeff(2 * k, mu) == 2 * k


def test_build_site_j0():
    g = build_site(ModuleSpec(Fraction(1, 2), 2))
    assert g.j0 == SparseRatMatrix.diag([1, 2, 3])


@pytest.mark.parametrize("mu", ["0", "1/2", "-7/3"])
def test_build_site_parity(mu):
    g = build_site(ModuleSpec(mu, 2))
    assert g.parity == SparseRatMatrix.diag([1, -1, 1])


def test_build_site_jminus_entries():
    g = build_site(ModuleSpec(Fraction(1, 2), 2))
    assert dict(((i, j), v) for i, j, v in g.jminus.items()) == {(0, 1): 2, (1, 2): 2}


def test_generator_shapes():
    g = build_site(ModuleSpec(Fraction(1, 3), 5))
    assert g.j0.is_diagonal() and g.parity.is_diagonal()
    assert all(i == j + 1 for i, j, _ in g.jplus.items())
    assert all(j == i + 1 for i, j, _ in g.jminus.items())
    assert g.parity @ g.parity == SparseRatMatrix.identity(6)


def test_module_spec_validation():
    with pytest.raises(ValueError):
        ModuleSpec(Fraction(1, 2), 0)
    with pytest.raises(TypeError):
        ModuleSpec(0.5, 3)
    assert ModuleSpec.from_json_obj({"mu": "1/2", "truncation": 3}) == ModuleSpec(Fraction(1, 2), 3)
    assert ModuleSpec("2/4", 3).to_json_obj() == {"mu": "1/2", "truncation": 3}


def test_relations_hold_on_safe_levels():
    rep = verify_osp_relations(build_site(ModuleSpec(Fraction(1, 3), 6)))
    assert rep.passed
    # truncation breaks {J+,J-} = 2 J0 exactly at the top level
    assert rep.max_bad_level["{J+,J-}=2J0"] == 6
    assert rep.max_bad_level["P^2=1"] is None


@given(mus, st.integers(1, 6))
def test_relations_for_any_mu(mu, N):
    assert verify_osp_relations(build_site(ModuleSpec(mu, N))).passed


def test_flipped_parity_is_detected():
    g = build_site(ModuleSpec(Fraction(1, 3), 6))
    bad = g.replace(parity=g.parity.with_entry(2, 2, -1))
    rep = verify_osp_relations(bad)
    assert not rep.passed
    assert "P^2=1" not in rep.violated
    assert "{J+,P}=0" in rep.violated


def casimir_oracle(mu, n):
    # Gamma e_n = (-1)^n (n + mu - c_n) e_n
    return (-1) ** n * (n + mu - weight_coeff(n, mu))


@pytest.mark.parametrize("mu,N", [(Fraction(1, 2), 8), (Fraction(0), 4), (Fraction(-5, 7), 5)])
def test_casimir_is_scalar(mu, N):
    gamma = casimir_single(build_site(ModuleSpec(mu, N)))
    assert gamma == SparseRatMatrix.diag([casimir_oracle(mu, n) for n in range(N + 1)])
    assert gamma == SparseRatMatrix.identity(N + 1, mu)


def test_casimir_commutes_with_generators():
    g = build_site(ModuleSpec(Fraction(1, 3), 6))
    gamma = casimir_single(g)
    for x in (g.jplus, g.jminus, g.parity, g.j0):
        assert bracket("commutator", gamma, x).is_zero()


def test_jpm_products_diagonal_and_sum():
    g = build_site(ModuleSpec(Fraction(2, 5), 5))
    pm, mp = g.jplus @ g.jminus, g.jminus @ g.jplus
    assert pm.is_diagonal() and mp.is_diagonal()
    diff = pm + mp - g.j0 * 2
    assert all(i == 5 for i, _, _ in diff.items())
