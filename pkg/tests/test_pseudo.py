import random

import pytest

from wgcat.errors import CheckFailure, PreconditionError, SizeCapExceeded
from wgcat.fincat import cyclic_group_cat, d_discrete, indiscrete_cat, ordinal_cat
from wgcat.gen import (
    GenSpec,
    cell_grid,
    cell_pseudo,
    corrupt,
    gen_segalic,
    has_nontrivial_cells,
    random_retract,
    transport_to_pseudo,
)
from wgcat.nfold import external_product, grids_equal
from wgcat.pseudo import (
    PseudoGrid,
    bar_p,
    check_segalic,
    count_pairs,
    from_grid,
    is_segalic,
    pseudo_from_json,
    pseudo_to_json,
    restrict_level,
    segal_maps_pseudo,
    truncation_of,
    validate_pseudo,
)
from wgcat.simplex import IndexCat, constant_grid, nerve


def transported(seed, t=2, q=1):
    x = cell_grid(1, t, q)
    return x, transport_to_pseudo(x, {(1,): random_retract(x, random.Random(seed))})


def test_strict_functor_validates():
    h = from_grid(nerve(ordinal_cat(2)))
    validate_pseudo(h)
    cert = check_segalic(h)
    assert cert.n == 2
    assert len(cert.segal) == 2


def test_pair_count_matches_enumeration():
    idx = IndexCat(1, 3)
    assert count_pairs(idx) == len(list(idx.composable_pairs())) == 5374


def test_pair_cap_refuses_large_index():
    h = from_grid(cell_grid(2, 1, 1))
    with pytest.raises(SizeCapExceeded):
        validate_pseudo(h)


def test_transported_instance_is_segalic_and_not_strict():
    x, h = transported(0, t=3, q=2)
    validate_pseudo(h)
    check_segalic(h)
    assert has_nontrivial_cells(h)


def test_cell_pseudo_agrees_with_cell_grid():
    h, x = cell_pseudo(1, 2, 1), cell_grid(1, 2, 1)
    validate_pseudo(h)
    for f in h.index.arrows:
        for o in h[f.src].objects:
            assert h.map(f).ob(o) == x.map(f).ob(o)


def test_identity_choice_gives_strict_image():
    x = cell_grid(1, 2, 1)
    h = transport_to_pseudo(x, {})
    assert not has_nontrivial_cells(h)
    for k in x.indices():
        assert set(h[k].objects) == set(x[k].objects)


def test_transport_refuses_corner_choice():
    x = cell_grid(1, 1, 1)
    with pytest.raises(PreconditionError, match="corner"):
        transport_to_pseudo(x, {(0,): {}})
    with pytest.raises(PreconditionError):
        transport_to_pseudo(x, {(2,): {}})


def test_collapse_is_invariant_under_transport():
    x, h = transported(3, t=3, q=1)
    strict = bar_p(from_grid(x))
    moved = bar_p(h)
    for k in x.indices():
        assert len(strict[k].objects) == len(moved[k].objects)
    a, b = truncation_of(h), truncation_of(from_grid(x))
    for k in a.indices():
        assert len(a[k].objects) == len(b[k].objects)
        assert len(a[k].arrows) == len(b[k].arrows)


def test_constant_discrete_collapse():
    h = from_grid(constant_grid(d_discrete("ab"), 1))
    y = bar_p(h)
    assert all(len(y[k].objects) == 2 for k in y.indices())


def test_broken_cocycle_is_caught():
    h = gen_segalic(GenSpec(2, n=2, flavor="segalic-transport"))
    bad = corrupt(h, "cocycle", random.Random(2))
    with pytest.raises(CheckFailure) as e:
        validate_pseudo(bad)
    assert e.value.condition == "coherence:cocycle"


def test_wrong_phi_component_is_caught():
    h = from_grid(nerve(ordinal_cat(1)))

    def phi(g, f, y):
        cat = h[g.tgt]
        target = h.map(g).ob(h.map(f).ob(y))
        other = next((o for o in cat.objects if o != target), target)
        return cat.identity(other)

    bad = PseudoGrid(h.dim, h.m, lambda k: h[k], h.map, phi)
    with pytest.raises(CheckFailure) as e:
        validate_pseudo(bad)
    assert e.value.condition == "coherence:phi"
    g, f, y = e.value.where
    assert g.src == f.tgt


def test_fattened_corner_is_refused():
    h = from_grid(external_product([ordinal_cat(1), indiscrete_cat("ab")]))
    with pytest.raises(PreconditionError):
        segal_maps_pseudo(h, (2,), 1)
    with pytest.raises(CheckFailure) as e:
        check_segalic(h)
    assert e.value.condition == "segalic:a"


def test_broken_corner_fails_condition_a():
    _, h = transported(0, t=2, q=1)
    bad = corrupt(h, "corner", random.Random(0))
    assert not is_segalic(bad)
    with pytest.raises(CheckFailure) as e:
        check_segalic(bad)
    assert e.value.condition == "segalic:a"


def test_level_restriction_of_triple_instance():
    h = gen_segalic(GenSpec(0, n=3, flavor="segalic-transport"))
    check_segalic(h)
    for j in (0, 1):
        r, cert = restrict_level(h, j)
        assert r.dim == 1 and cert.n == 2


def test_level_restriction_needs_two_directions():
    with pytest.raises(PreconditionError):
        restrict_level(from_grid(nerve(ordinal_cat(1))), 0)


def test_json_round_trip():
    _, h = transported(5, t=2, q=2)
    d = pseudo_to_json(h)
    g = pseudo_from_json(d)
    validate_pseudo(g)
    assert pseudo_to_json(g) == d


@pytest.mark.parametrize("seed", range(4))
def test_generated_segalic(seed):
    h = gen_segalic(GenSpec(seed, n=2, flavor="segalic-transport"))
    validate_pseudo(h)
    check_segalic(h)
