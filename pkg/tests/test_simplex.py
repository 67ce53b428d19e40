import itertools
import random

import pytest
from hypothesis import given, strategies as st

from oracles import composable_strings

from wgcat.errors import CheckFailure, PreconditionError, TruncationError
from wgcat.fincat import (
    DiscreteCat,
    Functor,
    compose_functors,
    cyclic_group_cat,
    d_discrete,
    first_difference,
    indiscrete_cat,
    ordinal_cat,
    same_category,
)
from wgcat.gen import GenSpec, corrupt, gen_fincat
from wgcat.simplex import (
    Grid,
    IndexCat,
    apply_levelwise,
    codegeneracy,
    coface,
    compose_index,
    constant_grid,
    decompose,
    grid_from_json,
    grid_to_json,
    is_multinerve,
    is_nerve,
    monotone_maps,
    multinerve_failure,
    n_monotone_maps,
    nerve,
    reindex,
    segal_map,
    unreindex,
    validate_grid,
)


def brute_monotone(a, b):
    return [v for v in itertools.product(range(b + 1), repeat=a + 1) if all(x <= y for x, y in zip(v, v[1:]))]


@pytest.mark.parametrize("a,b", [(a, b) for a in range(4) for b in range(4)])
def test_monotone_maps_match_brute_force(a, b):
    assert monotone_maps(a, b) == sorted(brute_monotone(a, b))
    assert n_monotone_maps(a, b) == len(brute_monotone(a, b))


def test_index_category_sizes():
    # frozen from brute-force enumeration of monotone maps
    assert len(IndexCat(1, 3).arrows) == sum(len(brute_monotone(b, a)) for a in range(4) for b in range(4)) == 121
    per_direction = sum(len(brute_monotone(b, a)) for a in range(2) for b in range(2))
    assert len(IndexCat(2, 1).arrows) == per_direction**2 == 49


def test_cofaces_and_codegeneracies():
    assert coface(2, 0) == (1, 2)
    assert coface(2, 2) == (0, 1)
    assert codegeneracy(1, 0) == (0, 0, 1)
    faces, degens = decompose((0, 0, 2), 2)
    assert faces == [1] and degens == [0]


@given(st.integers(0, 10_000))
def test_index_composition_is_associative(seed):
    rng = random.Random(seed)
    idx = IndexCat(2, 2)
    objs = idx.objects
    a, b, c, d = (rng.choice(objs) for _ in range(4))
    f, g, h = rng.choice(idx.hom(a, b)), rng.choice(idx.hom(b, c)), rng.choice(idx.hom(c, d))
    assert compose_index(h, compose_index(g, f)) == compose_index(compose_index(h, g), f)


@pytest.mark.parametrize("seed", range(6))
def test_nerve_levels_are_composable_strings(seed):
    c = gen_fincat(GenSpec(seed, flavor="fincat"))
    x = nerve(c)
    assert set(x[(0,)].objects) == set(c.objects)
    assert set(x[(1,)].objects) == set(c.arrows)
    for k in (2, 3):
        assert set(x[(k,)].objects) == set(composable_strings(c, k))


def test_nerve_of_arrow_category_level_two():
    # identity/identity, identity/arrow, arrow/identity and identity/identity at the other end
    assert len(nerve(ordinal_cat(1))[(2,)].objects) == len(composable_strings(ordinal_cat(1), 2)) == 4


def test_nerve_of_terminal_is_constant_point():
    x = nerve(d_discrete(["*"]))
    assert all(len(x[k].objects) == 1 for k in x.indices())


@pytest.mark.parametrize("seed", range(6))
def test_structure_maps_are_functorial(seed):
    c = gen_fincat(GenSpec(seed, flavor="fincat"))
    x = nerve(c)
    idx = IndexCat(1, 3)
    rng = random.Random(seed)
    arrows = list(idx.arrows)
    for _ in range(30):
        f = rng.choice(arrows)
        g = rng.choice([a for a in arrows if a.src == f.tgt])
        lhs = x.map(compose_index(g, f))
        rhs = compose_functors(x.map(g), x.map(f))
        assert first_difference(lhs, rhs) is None


@pytest.mark.parametrize("seed", range(8))
def test_nerve_round_trip(seed):
    c = gen_fincat(GenSpec(seed, flavor="fincat"))
    x = validate_grid(nerve(c))
    ok, ic = is_nerve(x)
    assert ok
    assert len(ic.x1.objects) == len(c.arrows)


def test_constant_discrete_grid_is_nerve():
    x = constant_grid(d_discrete("ab"), 1)
    validate_grid(x)
    ok, ic = is_nerve(x)
    assert ok and len(ic.x0.objects) == 2


def test_extra_two_simplex_breaks_segal_at_two():
    c = gen_fincat(GenSpec(4, flavor="fincat"), "poset")
    bad = corrupt(c, "segal", random.Random(0))
    validate_grid(bad)
    assert not segal_map(bad, (2,)).iso
    assert is_nerve(bad) == (False, 2)


def test_segal_map_preconditions():
    x = nerve(ordinal_cat(1))
    with pytest.raises(PreconditionError):
        segal_map(x, (1,))
    with pytest.raises(TruncationError):
        x[(4,)]


def test_reindex_round_trip():
    from wgcat.nfold import external_product, grids_equal

    x = external_product([ordinal_cat(1), indiscrete_cat("ab"), cyclic_group_cat(2)])
    assert grids_equal(reindex(x, 1), x)
    y = reindex(x, 2)
    for k in x.indices():
        assert y[(k[1], k[0])] is x[k]
    assert grids_equal(unreindex(y, 2), x)


def test_multinerve_detection():
    from wgcat.nfold import external_product

    x = external_product([ordinal_cat(1), indiscrete_cat("ab"), cyclic_group_cat(2)])
    assert is_multinerve(x)
    assert multinerve_failure(constant_grid(d_discrete("a"), 2)) is None


def test_corrupted_face_fails_validation():
    x = nerve(ordinal_cat(2))
    c1, c0 = x[(1,)], x[(0,)]
    good = x.face
    broken = Grid(
        1,
        3,
        lambda k: x[k],
        lambda k, i, j: (
            Functor(c1, c0, lambda a: 0, lambda a: ("id", 0)) if k == (1,) and j == 0 else good(k, i, j)
        ),
        lambda k, i, j: x.degen(k, i, j),
    )
    with pytest.raises(CheckFailure) as e:
        validate_grid(broken)
    assert e.value.condition == "simplicial identity"


def test_levelwise_p_of_constant_grid():
    y = apply_levelwise(constant_grid(indiscrete_cat("ab"), 1), "p")
    assert all(len(y[k].objects) == 1 for k in y.indices())
    q = apply_levelwise(nerve(ordinal_cat(1)), "q")
    p = apply_levelwise(nerve(ordinal_cat(1)), "p")
    assert [len(q[k].objects) for k in q.indices()] == [len(p[k].objects) for k in p.indices()]


def test_grid_json_round_trip():
    x = nerve(cyclic_group_cat(2))
    d = grid_to_json(x)
    y = grid_from_json(d)
    validate_grid(y)
    assert grid_to_json(y) == d
