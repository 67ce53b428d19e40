import pytest
from hypothesis import given, strategies as st

from oracles import associative, components, iso_classes

from wgcat.errors import CheckFailure, StructuralError
from wgcat.fincat import (
    DiscreteCat,
    FinCat,
    Functor,
    bo_ff_factorize,
    check_equivalence,
    coproduct,
    cyclic_group_cat,
    d_discrete,
    discrete_functor,
    fincat_from_json,
    fincat_to_json,
    from_graph,
    indiscrete_cat,
    is_equivalence,
    is_equivalence_relation_cat,
    is_isomorphism,
    m_maxgroupoid,
    monoid_cat,
    ordinal_cat,
    p_isoclasses,
    product,
    pullback_over_discrete,
    q_components,
    same_category,
    terminal_cat,
    to_fincat,
    validate_fincat,
    validate_functor,
)
from wgcat.gen import CAT_FLAVORS, GenSpec, gen_fincat, random_cospan
import random


def random_cat(seed, flavor=None):
    return gen_fincat(GenSpec(seed, flavor="fincat"), flavor)


def test_discrete_validates():
    c = d_discrete(["a", "b"])
    validate_fincat(c)
    assert len(c.arrows) == 2


def test_non_composable_composite_is_reported():
    c = FinCat(
        ["a", "b"],
        {"ia": ("a", "a"), "ib": ("b", "b"), "f": ("a", "b")},
        {"a": "ia", "b": "ib"},
        {("ia", "ia"): "ia", ("ib", "ib"): "ib", ("f", "ia"): "ia", ("ib", "f"): "f"},
    )
    with pytest.raises(CheckFailure) as e:
        validate_fincat(c)
    assert e.value.condition == "composite endpoints"
    assert e.value.where == ("f", "ia")


def test_undeclared_endpoint_is_structural():
    c = FinCat(["a"], {"ia": ("a", "a"), "f": ("a", "z")}, {"a": "ia"}, {})
    with pytest.raises(StructuralError):
        validate_fincat(c)


def test_corrupted_associativity_names_triple():
    from wgcat.gen import corrupt

    # in a poset every changed composite already breaks an endpoint or unit law
    c = to_fincat(product(ordinal_cat(1), cyclic_group_cat(2)))
    bad = corrupt(c, "associativity", random.Random(1))
    assert associative(c) and not associative(bad)
    with pytest.raises(CheckFailure) as e:
        validate_fincat(bad)
    assert e.value.condition == "associativity"
    h, g, f = e.value.where
    assert bad.compose(h, bad.compose(g, f)) != bad.compose(bad.compose(h, g), f)


@pytest.mark.parametrize("seed", range(12))
def test_generated_categories_validate(seed):
    c = random_cat(seed, CAT_FLAVORS[seed % len(CAT_FLAVORS)])
    validate_fincat(c)
    assert associative(c)
    assert len(c.arrows) <= 40


def test_q_trivial_cases(arrow_cat):
    assert len(q_components(d_discrete(["a", "b"]))) == 2
    assert len(q_components(arrow_cat)) == 1


def test_q_iso_pair_plus_point():
    c = coproduct(indiscrete_cat(["a", "b"]), terminal_cat())
    assert len(q_components(c)) == components(list(c.objects), [(c.src(a), c.tgt(a)) for a in c.arrows]) == 2


def test_p_cases(arrow_cat):
    assert len(p_isoclasses(d_discrete(["a", "b"]))) == 2
    assert len(p_isoclasses(indiscrete_cat(["a", "b"]))) == 1
    c = coproduct(arrow_cat, indiscrete_cat(["c", "d"]))
    assert len(p_isoclasses(c)) == iso_classes(c) == 3


@pytest.mark.parametrize("seed", range(20))
def test_q_and_p_match_oracles(seed):
    c = random_cat(100 + seed)
    edges = [(c.src(a), c.tgt(a)) for a in c.arrows]
    assert len(q_components(c)) == components(list(c.objects), edges)
    assert len(p_isoclasses(c)) == iso_classes(c)


def test_p_of_product_is_factorwise():
    c = product(indiscrete_cat(["a", "b"]), ordinal_cat(1))
    assert len(p_isoclasses(c)) == iso_classes(to_fincat(c)) == 2


def test_m_of_groupoid_and_free_arrow(arrow_cat):
    g = cyclic_group_cat(3)
    assert len(m_maxgroupoid(g).arrows) == 3
    assert len(m_maxgroupoid(arrow_cat).arrows) == 2


def test_m_of_monoid_is_unit_group():
    # multiplication mod 4: units {1, 3}
    c = monoid_cat(range(4), lambda g, f: g * f % 4, 1)
    assert sorted(m_maxgroupoid(c).arrows) == [1, 3]


def test_d_discrete():
    assert d_discrete([]).objects == ()
    assert len(d_discrete(["x"]).arrows) == 1
    assert len(d_discrete("abc").arrows) == 3


def test_pullback_over_discrete_cases():
    t = terminal_cat()
    p, _, _ = pullback_over_discrete(
        discrete_functor(d_discrete("ab"), t, lambda x: "*"), discrete_functor(d_discrete("c"), t, lambda x: "*")
    )
    assert sorted(p.objects) == [("a", "c"), ("b", "c")]


def test_pullback_of_arrow_cats_over_two_points(arrow_cat):
    foot = d_discrete([0, 1])
    legs = []
    for _ in range(2):
        c = coproduct(arrow_cat, arrow_cat)
        legs.append(Functor(c, foot, lambda x: x[0], lambda a, c=c: foot.identity(c.src(a)[0])))
    p, _, _ = pullback_over_discrete(*legs)
    expected = sum(1 for x in legs[0].dom.objects for y in legs[1].dom.objects if x[0] == y[0])
    assert len(p.objects) == expected
    assert len(q_components(p)) == 2


def test_equivalence_examples(arrow_cat):
    c = indiscrete_cat(["a", "b"])
    check_equivalence(Functor(c, c, lambda x: x, lambda a: a)).verify()
    incl = Functor(d_discrete(["a"]), c, lambda x: x, lambda a: ("a", "a"))
    check_equivalence(incl).verify()
    d = d_discrete([0, 1])
    into_arrow = Functor(d, arrow_cat, lambda x: x, lambda a: (a, a))
    with pytest.raises(CheckFailure) as e:
        check_equivalence(into_arrow)
    assert e.value.condition == "not full"


def test_bo_ff_factorization(arrow_cat):
    c = indiscrete_cat(["a", "b"])
    t = terminal_cat()
    v, g = bo_ff_factorize(Functor(c, t, lambda x: "*", lambda a: t.identity("*")))
    mid = v.cod
    assert len(mid.objects) == 2
    assert all(len(mid.hom(x, y)) == 1 for x in mid.objects for y in mid.objects)
    v, g = bo_ff_factorize(discrete_functor(d_discrete("ab"), t, lambda x: "*"))
    assert is_equivalence_relation_cat(v.cod) and len(v.cod.hom("a", "b")) == 1
    validate_functor(v)
    validate_functor(g)


def test_equivalence_relation_predicate():
    assert is_equivalence_relation_cat(d_discrete("ab"))
    assert is_equivalence_relation_cat(indiscrete_cat("ab"))
    assert not is_equivalence_relation_cat(cyclic_group_cat(2))


def test_product_and_coproduct_units():
    c = to_fincat(ordinal_cat(2))
    assert same_category(to_fincat(product(c, terminal_cat())), c) or len(product(c, terminal_cat()).arrows) == len(
        c.arrows
    )
    assert len(coproduct(c, d_discrete([])).arrows) == len(c.arrows)


@pytest.mark.parametrize("seed", range(8))
def test_q_of_product_is_product_of_q(seed):
    a, b = random_cat(200 + seed), random_cat(300 + seed)
    assert len(q_components(product(a, b))) == len(q_components(a)) * len(q_components(b))


def test_graph_with_relation():
    c = from_graph("abcd", {"f": ("a", "b"), "g": ("b", "d"), "h": ("a", "c"), "k": ("c", "d")}, [("fg", "hk")])
    validate_fincat(c)
    assert len(c.hom("a", "d")) == 1


def test_json_round_trip():
    c = to_fincat(product(cyclic_group_cat(2), ordinal_cat(1)))
    d = fincat_to_json(c)
    assert fincat_to_json(fincat_from_json(d)) == d


def test_isomorphism_detection():
    c = cyclic_group_cat(3)
    neg = Functor(c, c, lambda x: x, lambda a: (-a) % 3)
    assert is_isomorphism(neg)
    zero = Functor(c, c, lambda x: x, lambda a: 0)
    assert not is_isomorphism(zero)
    assert not is_equivalence(zero)


@given(st.integers(0, 10_000))
def test_random_categories_are_associative(seed):
    c = random_cat(seed)
    validate_fincat(c)
    assert associative(c)


@given(st.integers(0, 10_000))
def test_pullback_components_are_pullback_of_components(seed):
    f, g = random_cospan(random.Random(seed))
    p, pa, pb = pullback_over_discrete(f, g)
    qa, qb, qp = q_components(f.dom), q_components(g.dom), q_components(p)
    pairs = {(a, b) for a in qa.elements for b in qb.elements if f.ob(a) == g.ob(b)}
    assert len(qp) == len(pairs)
