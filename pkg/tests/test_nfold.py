import pytest
from hypothesis import given, strategies as st

from wgcat.errors import CheckFailure, PreconditionError
from wgcat.fincat import Functor, d_discrete, discrete_functor, indiscrete_cat, ordinal_cat, cyclic_group_cat
from wgcat.gen import GenSpec, gen_fincat, gen_wg
from wgcat.nfold import (
    external_product,
    fiber_decomposition_holds,
    from_multinerve,
    grids_equal,
    hom_fiber,
    is_discrete_nfold,
    multinerve,
    normalize,
    objects_grid,
    validate_nfold,
    xi_swap,
    xi_unswap,
)
from wgcat.simplex import constant_grid, is_multinerve, nerve, validate_grid


def double(a, b):
    return external_product([a, b])


def test_external_product_is_double_category():
    x = double(ordinal_cat(1), cyclic_group_cat(2))
    nf = validate_nfold(x)
    assert nf.n == 2
    # entry k is N_k[1] x Z/2
    assert [len(x[(k,)].objects) for k in range(4)] == [2, 3, 4, 5]


def test_multinerve_round_trip():
    x = double(indiscrete_cat("ab"), ordinal_cat(1))
    y = multinerve(x)
    assert y.dim == 2 and is_multinerve(y)
    assert grids_equal(from_multinerve(y), x)


def test_corrupted_level_breaks_segal_in_last_direction():
    from wgcat.gen import corrupt
    import random

    bad = corrupt(ordinal_cat(2), "segal", random.Random(0))
    with pytest.raises(CheckFailure) as e:
        validate_nfold(bad)
    assert e.value.condition == "segal"


@pytest.mark.parametrize("k", [1, 2])
def test_xi_round_trip_double(k):
    x = normalize(double(ordinal_cat(1), indiscrete_cat("ab")))
    assert grids_equal(xi_unswap(xi_swap(x, k), k), x)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_xi_round_trip_triple(k):
    x = normalize(external_product([ordinal_cat(1), d_discrete("ab"), cyclic_group_cat(2)]))
    assert grids_equal(xi_unswap(xi_swap(x, k), k), x)


def test_xi_transposes_double_category():
    # swapping the two directions of A ⊠ B gives B ⊠ A up to the string relabelling
    a, b = ordinal_cat(1), indiscrete_cat("ab")
    z = xi_swap(double(a, b), 2)
    w = double(b, a)
    for k in z.indices():
        assert len(z[k].objects) == len(w[k].objects)
        assert len(z[k].arrows) == len(w[k].arrows)


def test_xi_direction_out_of_range():
    with pytest.raises(PreconditionError):
        xi_swap(double(ordinal_cat(1), ordinal_cat(1)), 3)


def test_discrete_input():
    x = constant_grid(d_discrete("ab"), 1)
    assert is_discrete_nfold(x)
    z = xi_swap(x, 2)
    assert all(len(z[k].objects) == 2 for k in z.indices())
    assert not is_discrete_nfold(double(ordinal_cat(1), d_discrete("a")))


def test_objects_grid_of_discrete_inclusion():
    from wgcat.nfold import discrete_inclusion

    x = double(ordinal_cat(1), indiscrete_cat("ab"))
    y = objects_grid(discrete_inclusion(x))
    validate_grid(y)
    assert grids_equal(y, x)


def test_hom_fibers_of_indiscrete_double_category():
    x = double(indiscrete_cat("ab"), d_discrete("*"))
    point = d_discrete("*")
    gamma = {(): Functor(x[(0,)], point, lambda o: "*", lambda a: point.identity("*"))}
    f = hom_fiber(x, "*", "*", gamma)
    assert len(f[()].objects) == len(x[(1,)].objects)
    assert fiber_decomposition_holds(x, gamma)


def test_hom_fibers_split_level_one():
    x = double(ordinal_cat(2), d_discrete("p"))
    pts = d_discrete([0, 1, 2])
    gamma = {(): Functor(x[(0,)], pts, lambda o: o[0], lambda a: pts.identity(x[(0,)].src(a)[0]))}
    assert fiber_decomposition_holds(x, gamma)
    assert len(hom_fiber(x, 0, 2, gamma)[()].objects) == 1
    assert len(hom_fiber(x, 2, 0, gamma)[()].objects) == 0
    with pytest.raises(PreconditionError):
        hom_fiber(x, 0, 7, gamma)


@given(st.integers(0, 5_000))
def test_generated_wg_instances_round_trip(seed):
    x = gen_wg(GenSpec(seed, n=2))
    validate_nfold(x)
    y = normalize(x)
    for k in (1, 2):
        assert grids_equal(xi_unswap(xi_swap(y, k), k), y)
