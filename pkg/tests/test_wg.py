import pytest
from hypothesis import given, strategies as st

from wgcat.errors import CheckFailure, HypothesisFailure, PreconditionError
from wgcat.fincat import cyclic_group_cat, d_discrete, indiscrete_cat, ordinal_cat
from wgcat.gen import GenSpec, gen_hd, gen_nequiv_to_hd, gen_wg
from wgcat.nfold import external_product, is_discrete_nfold
from wgcat.simplex import constant_grid, identity_grid_map, validate_grid
from wgcat.wg import (
    check_gamma_levelwise_equivalence,
    check_hd,
    check_induced_segal_on_hd,
    check_nequiv,
    check_wg,
    criterion_wg,
    discretize,
    entries_are_equivalence_relations,
    gamma_n,
    is_hd,
    is_wg,
    level,
    nerve_dir2_wg,
    p_truncate,
    verify_hd_criterion,
    verify_nequiv_to_hd,
)


def indiscrete_double():
    return external_product([indiscrete_cat("ab"), indiscrete_cat("xy")])


def test_discrete_is_hd_and_wg():
    x = constant_grid(d_discrete("ab"), 1)
    assert check_hd(x).n == 2
    assert is_wg(x)
    assert is_discrete_nfold(p_truncate(x))


def test_iterated_indiscrete_is_hd():
    check_hd(indiscrete_double())
    check_hd(external_product([indiscrete_cat("ab"), d_discrete("p"), indiscrete_cat("xy")]))


def test_non_invertible_arrow_fails_groupoidal():
    with pytest.raises(CheckFailure) as e:
        check_hd(external_product([indiscrete_cat("ab"), ordinal_cat(1)]))
    assert e.value.condition == "hd:groupoidal"


def test_one_fold_hd_means_equivalence_relation():
    from wgcat.simplex import grid_from_category

    assert is_hd(grid_from_category(indiscrete_cat("ab")))
    assert not is_hd(grid_from_category(cyclic_group_cat(2)))


def test_discretization_of_indiscrete_is_point():
    d = discretize(indiscrete_double())
    assert len(d.points) == 1
    d = discretize(constant_grid(d_discrete("abc"), 1))
    assert d.points == ("a", "b", "c")


def test_two_category_with_discrete_objects_is_wg():
    # a 2-category whose 0-cells are the objects of [1] and whose hom-categories are indiscrete
    cert = check_wg(external_product([ordinal_cat(1), indiscrete_cat("ab")]))
    assert cert.n == 2


def test_level_zero_not_hd_fails_condition_a():
    x = external_product([ordinal_cat(1), ordinal_cat(1)])
    with pytest.raises(CheckFailure) as e:
        check_wg(x)
    assert e.value.condition == "wg:a"


def test_identity_and_gamma_are_n_equivalences():
    x = indiscrete_double()
    check_nequiv(identity_grid_map(x))
    assert check_gamma_levelwise_equivalence(x)
    assert check_induced_segal_on_hd(x)
    g = gamma_n(x)
    g.check_natural()


def test_p_truncate_of_hd_is_hd():
    x = external_product([indiscrete_cat("ab"), indiscrete_cat("xyz")])
    y = p_truncate(x)
    validate_grid(y)
    check_hd(y)


def test_hd_criterion_on_hd_input():
    verify_hd_criterion(indiscrete_double())


def test_hd_criterion_refuses_non_hd_level_one():
    x = external_product([ordinal_cat(1), indiscrete_cat("ab")])
    with pytest.raises(HypothesisFailure):
        verify_hd_criterion(x)


def test_criterion_requires_n_at_least_two():
    from wgcat.simplex import grid_from_category

    with pytest.raises(PreconditionError):
        criterion_wg(grid_from_category(d_discrete("a")))


def test_criterion_hypothesis_failure():
    with pytest.raises(HypothesisFailure):
        criterion_wg(external_product([ordinal_cat(1), ordinal_cat(1)]))


def test_nerve_in_direction_two_is_levelwise_wg():
    assert len(nerve_dir2_wg(external_product([ordinal_cat(1), indiscrete_cat("ab")]))) == 4


@pytest.mark.parametrize("seed", range(6))
def test_generated_hd_instances(seed):
    x = gen_hd(GenSpec(seed, n=2, flavor="hd"))
    check_hd(x)
    check_wg(x)
    assert entries_are_equivalence_relations(x)


@pytest.mark.parametrize("seed", range(3))
def test_generated_triple_hd(seed):
    x = gen_hd(GenSpec(seed, n=3, flavor="hd"))
    check_hd(x)
    check_wg(x)


@pytest.mark.parametrize("seed", range(6))
def test_generated_wg_meet_criterion(seed):
    x = gen_wg(GenSpec(seed, n=2))
    criterion_wg(x)
    assert level(x, 0).dim == 0


@pytest.mark.parametrize("seed", range(4))
def test_nequiv_to_hd_forces_hd(seed):
    f = gen_nequiv_to_hd(GenSpec(seed, n=2, flavor="hd"))
    check_nequiv(f)
    verify_nequiv_to_hd(f)


@given(st.integers(0, 10_000))
def test_hd_implies_wg(seed):
    x = gen_hd(GenSpec(seed, n=2, flavor="hd"))
    assert is_hd(x) and is_wg(x)
