import random

import pytest
from hypothesis import given, strategies as st

from oracles import associative

from wgcat.errors import PreconditionError
from wgcat.fincat import (
    fincat_to_json,
    is_equivalence_relation_cat,
    p_isoclasses,
    validate_fincat,
)
from wgcat.gen import (
    CORRUPTIONS,
    FLAVORS,
    CellCat,
    GenSpec,
    cell_grid,
    corrupt,
    gen_corrupted,
    gen_discrete,
    gen_fincat,
    gen_hd,
    gen_wg,
    generate,
    random_cospan,
    random_monoid,
    random_retract,
    transport_to_pseudo,
)
from wgcat.nfold import is_discrete_nfold, validate_nfold
from wgcat.simplex import grid_to_json, validate_grid
from wgcat.suite import fails_exactly
from wgcat.wg import check_wg


def test_spec_round_trip():
    spec = GenSpec(7, n=3, flavor="hd", target="")
    assert GenSpec.from_json(spec.to_json()) == spec


def test_generation_is_deterministic():
    a = grid_to_json(gen_wg(GenSpec(11)))
    b = grid_to_json(gen_wg(GenSpec(11)))
    assert a == b
    assert fincat_to_json(gen_fincat(GenSpec(3, flavor="fincat"))) == fincat_to_json(
        gen_fincat(GenSpec(3, flavor="fincat"))
    )


def test_discrete_category_flavor():
    c = gen_fincat(GenSpec(0, max_objects=3, flavor="fincat"), "discrete")
    assert len(c.arrows) == len(c.objects)


@pytest.mark.parametrize("seed", range(10))
def test_equivalence_relation_flavor(seed):
    assert is_equivalence_relation_cat(gen_fincat(GenSpec(seed, flavor="fincat"), "eqrel"))


def test_monoid_of_two_elements():
    # the monoid generated by a constant map on two points is {id, const}
    rng = random.Random(0)
    for _ in range(200):
        c = random_monoid(rng, 2)
        if len(c.arrows) == 2:
            break
    assert len(c.objects) == 1 and len(c.arrows) == 2
    validate_fincat(c)
    assert associative(c)


def test_discrete_spec_gives_discrete_nfold():
    x = gen_discrete(GenSpec(3, n=2, flavor="discrete"))
    assert is_discrete_nfold(x)


def test_wg_double_category_with_two_point_objects():
    for seed in range(40):
        x = gen_wg(GenSpec(seed, n=2))
        if len(p_isoclasses(x[(0,)])) >= 2 and not x[(0,)].is_discrete():
            break
    assert check_wg(x).n == 2


def test_small_triple_spec_is_wg():
    assert check_wg(gen_wg(GenSpec(1, n=3))).n == 3


def test_cell_grid_is_strict_nfold():
    validate_nfold(cell_grid(1, 2, 2))
    validate_nfold(cell_grid(2, 1, 1))
    c = CellCat(2, 2, 2)
    assert len(c.objects) == 4 and len(c.arrows) == 64


def test_transport_choices_fixed_by_retract():
    x = cell_grid(1, 3, 1)
    choice = random_retract(x, random.Random(0))
    reps = {x[(1,)].tgt(a) for a in choice.values()}
    h = transport_to_pseudo(x, {(1,): choice})
    assert set(h[(1,)].objects) == reps


@pytest.mark.parametrize("target", sorted(CORRUPTIONS))
def test_each_corruption_fails_exactly(target):
    base, bad = gen_corrupted(GenSpec(1, flavor="corrupted", target=target))
    assert fails_exactly(target, base, bad)


def test_unknown_corruption():
    with pytest.raises(PreconditionError):
        corrupt(None, "nothing")
    with pytest.raises(PreconditionError):
        gen_corrupted(GenSpec(0, flavor="corrupted", target="nothing"))


@pytest.mark.parametrize("flavor", [f for f in FLAVORS if f != "corrupted"])
def test_generate_dispatch(flavor):
    assert generate(GenSpec(0, flavor=flavor)) is not None


def test_unknown_flavor():
    with pytest.raises(PreconditionError):
        generate(GenSpec(0, flavor="nope"))


@given(st.integers(0, 10_000))
def test_cospans_have_discrete_feet(seed):
    f, g = random_cospan(random.Random(seed))
    assert f.cod is g.cod and f.cod.is_discrete()


@given(st.integers(0, 10_000))
def test_generated_hd_entries_are_small(seed):
    x = gen_hd(GenSpec(seed, n=2, flavor="hd"))
    validate_grid(x)
    assert len(x[(3,)].arrows) <= 40
