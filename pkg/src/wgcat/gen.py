"""Seeded instance generators and corruption operators.

Everything here is deterministic given the seed.  Positive generators build
instances that satisfy a target property by construction; :func:`corrupt`
breaks exactly one named condition of an instance.
"""

import itertools
import random
from dataclasses import asdict, dataclass

from .errors import PreconditionError
from .fincat import (
    Category,
    DiscreteCat,
    FinCat,
    Functor,
    FullSubCat,
    coproduct,
    cyclic_group_cat,
    d_discrete,
    discrete_functor,
    from_graph,
    indiscrete_cat,
    monoid_cat,
    ordinal_cat,
    p_isoclasses,
    product,
    product_functor,
    q_components,
    to_fincat,
)
from .nfold import external_product, string_functor
from .pseudo import PseudoGrid
from .simplex import (
    DEFAULT_M,
    Grid,
    IndexArrow,
    codegeneracy,
    coface,
    corner,
    GridMap,
    directional_arrow,
)

FLAVORS = ("discrete", "hd", "wg-strict", "segalic-transport", "corrupted")


@dataclass
class GenSpec:
    """Parameters of a generated instance; ``flavor`` is one of :data:`FLAVORS`."""

    seed: int
    n: int = 2
    m: int = DEFAULT_M
    max_objects: int = 3
    flavor: str = "wg-strict"
    target: str = ""

    def rng(self):
        return random.Random(f"{self.flavor}:{self.n}:{self.seed}")

    def to_json(self):
        return asdict(self)

    @classmethod
    def from_json(cls, d):
        return cls(**d)


# --- finite categories -----------------------------------------------------------

CAT_FLAVORS = ("discrete", "eqrel", "poset", "monoid", "graph", "sum", "product")


def eqrel_cat(blocks, name=None):
    """The equivalence relation with the given blocks: one arrow ``(x, y)`` inside each block."""
    objects = [x for b in blocks for x in b]
    arrows = {(x, y): (x, y) for b in blocks for x in b for y in b}
    return FinCat(
        objects, arrows, {x: (x, x) for x in objects}, lambda g, f: (f[0], g[1]), name=name or "E"
    )


def random_partition(rng, elements):
    blocks = []
    for x in elements:
        i = rng.randrange(len(blocks) + 1)
        if i == len(blocks):
            blocks.append([x])
        else:
            blocks[i].append(x)
    return [tuple(b) for b in blocks]


def random_poset(rng, size):
    """A random poset on ``0..size-1`` refining the usual order."""
    rel = {(i, i) for i in range(size)}
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < 0.4:
                rel.add((i, j))
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), repeat=2):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    arrows = {(a, b): (a, b) for a, b in rel}
    return FinCat(range(size), arrows, {i: (i, i) for i in range(size)}, lambda g, f: (f[0], g[1]))


def random_monoid(rng, points):
    """The transformation monoid generated by one or two random self-maps of a finite set."""
    gens = [tuple(rng.randrange(points) for _ in range(points)) for _ in range(rng.randint(1, 2))]
    unit = tuple(range(points))
    elements, frontier = {unit}, [unit]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = tuple(g[i] for i in e)
                if h not in elements:
                    elements.add(h)
                    nxt.append(h)
        frontier = nxt
    names = {e: i for i, e in enumerate(sorted(elements))}
    back = {i: e for e, i in names.items()}

    def mult(g, f):
        # g after f
        return names[tuple(back[g][i] for i in back[f])]

    return monoid_cat(sorted(names.values()), mult, names[unit])


def random_graph_cat(rng, size):
    """A free category on a random acyclic graph, sometimes with one commuting square."""
    gens = {}
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < 0.5:
                gens[f"a{i}{j}"] = (i, j)
    if rng.random() < 0.5 and size >= 3:
        gens.setdefault("a01", (0, 1))
        gens.setdefault("a12", (1, 2))
        gens["b02"] = (0, 2)
        return from_graph(range(size), gens, [(("a01", "a12"), ("b02",))])
    return from_graph(range(size), gens)


def gen_fincat(spec, flavor=None, max_arrows=40):
    """A seeded random finite category of the given flavor (see :data:`CAT_FLAVORS`)."""
    rng = spec.rng() if isinstance(spec, GenSpec) else spec
    size_cap = spec.max_objects if isinstance(spec, GenSpec) else 3
    flavor = flavor or rng.choice(CAT_FLAVORS)
    for _ in range(50):
        c = _fincat(rng, flavor, size_cap)
        if len(c.arrows) <= max_arrows:
            return c
    raise PreconditionError(f"could not generate a {flavor} category within {max_arrows} arrows")


def _fincat(rng, flavor, size_cap):
    size = rng.randint(1, size_cap)
    if flavor == "discrete":
        return d_discrete(range(size))
    if flavor == "eqrel":
        return eqrel_cat(random_partition(rng, range(size)))
    if flavor == "poset":
        return random_poset(rng, size)
    if flavor == "monoid":
        return random_monoid(rng, rng.randint(1, 3))
    if flavor == "graph":
        return random_graph_cat(rng, size)
    if flavor == "sum":
        a, b = (_fincat(rng, rng.choice(CAT_FLAVORS[:5]), 2) for _ in range(2))
        return to_fincat(coproduct(a, b))
    if flavor == "product":
        a, b = (_fincat(rng, rng.choice(CAT_FLAVORS[:5]), 2) for _ in range(2))
        return to_fincat(product(a, b))
    raise PreconditionError(f"unknown category flavor {flavor!r}")


# --- strict cell grids -------------------------------------------------------------


class CellCat(Category):
    """Labellings of the cells of a box by a cyclic group ``T``, with ``Z/q``-labelled arrows.

    Objects are tuples in ``Z/t`` (one entry per cell), there is a set of
    arrows ``(x, y, m)`` with ``m`` in ``(Z/q)^cells`` between any two
    objects, and composition adds the ``m`` labels.  With ``t == 1`` this is
    a power of the one-object category ``B(Z/q)``.
    """

    def __init__(self, ncells, t, q, name=None):
        self.ncells, self.t, self.q, self.name = ncells, t, q, name
        self.objects = tuple(itertools.product(range(t), repeat=ncells))
        self._labels = tuple(itertools.product(range(q), repeat=ncells))

    def hom(self, x, y):
        return tuple((x, y, m) for m in self._labels)

    def src(self, a):
        return a[0]

    def tgt(self, a):
        return a[1]

    def identity(self, x):
        return (x, x, (0,) * self.ncells)

    def compose(self, g, f):
        if f[1] != g[0]:
            raise KeyError((g, f))
        return (f[0], g[1], tuple((a + b) % self.q for a, b in zip(f[2], g[2])))

    def _is_iso(self, a):
        return True


def _cells(k):
    return tuple(itertools.product(*(range(1, ki + 1) for ki in k)))


def _cell_sources(alpha):
    """For each cell of ``alpha.tgt`` the positions of the source cells summed into it."""
    pos = {c: n for n, c in enumerate(_cells(alpha.src))}
    out = []
    for c in _cells(alpha.tgt):
        ranges = [range(th[a - 1] + 1, th[a] + 1) for th, a in zip(alpha.maps, c)]
        out.append(tuple(pos[s] for s in itertools.product(*ranges)))
    return tuple(out)


def cell_map(src_cat, tgt_cat, alpha):
    """The structure functor of a cell grid along ``alpha``: sum the labels cell by cell."""
    groups = _cell_sources(alpha)
    t, q = src_cat.t, src_cat.q

    def push(v, mod):
        return tuple(sum(v[p] for p in g) % mod for g in groups)

    return Functor(
        src_cat,
        tgt_cat,
        lambda x: push(x, t),
        lambda a: (push(a[0], t), push(a[1], t), push(a[2], q)),
    )


def cell_grid(dim, t=1, q=2, m=DEFAULT_M, name=None):
    """The strict ``dim``-grid whose entry at ``k`` is :class:`CellCat` on the ``k``-box.

    Structure maps add labels over the cells a monotone map collapses; this
    is the multinerve of an ``(dim+1)``-fold category whose corners (boxes
    with no cells) are the terminal category, so it is Segalic when viewed
    as a pseudo-functor.
    """
    entries = {}

    def entry(k):
        if k not in entries:
            entries[k] = CellCat(len(_cells(k)), t, q, name=f"cells{k}")
        return entries[k]

    def gen(values, k, i, r):
        alpha = directional_arrow(k, i, values, r)
        return cell_map(entry(k), entry(alpha.tgt), alpha)

    return Grid(
        dim,
        m,
        entry,
        lambda k, i, j: gen(coface(k[i - 1], j), k, i, k[i - 1] - 1),
        lambda k, i, j: gen(codegeneracy(k[i - 1], j), k, i, k[i - 1] + 1),
        name=name or f"cells(dim={dim},t={t},q={q})",
    )


def cell_pseudo(dim, t=1, q=2, m=DEFAULT_M):
    """:func:`cell_grid` as a strict pseudo-functor with an exact structure-map table."""
    x = cell_grid(dim, t, q, m)
    return PseudoGrid(
        dim, m, lambda k: x[k], lambda f: cell_map(x[f.src], x[f.tgt], f), name=x.name
    )


# --- transport along levelwise retract equivalences ------------------------------------


def _cube(dim):
    return (1,) * dim


def _cube_projections(k):
    """Index arrows from ``k`` to the unit cube, one per cell of ``k`` (in cell order)."""
    return [IndexArrow(tuple(k), _cube(len(k)), tuple((c - 1, c) for c in cell)) for cell in _cells(k)]


def random_retract(x, rng, twist=True):
    """A retract choice on the cube entry of ``x``: one representative per iso class.

    Returns ``{object: arrow}`` with each arrow an isomorphism from the object
    to its representative; representatives get their identity.  With
    ``twist`` the isomorphism is drawn at random from the hom-set, which
    makes the coherence cells of the transported pseudo-functor non-trivial.
    """
    c = x[_cube(x.dim)]
    cls = p_isoclasses(c)
    reps = {}
    for y in c.objects:
        reps.setdefault(cls(y), []).append(y)
    choice = {}
    for members in reps.values():
        rep = rng.choice(members)
        for y in members:
            if y == rep:
                choice[y] = c.identity(y)
            else:
                isos = [a for a in c.hom(y, rep) if c.is_iso(a)]
                choice[y] = rng.choice(isos) if twist else isos[0]
    return choice


class _Retract:
    """Levelwise retracts ``r_k``, ``η_k: y -> r_k y`` of a strict grid, fixed by the cube choice."""

    def __init__(self, x, choice):
        self.x, self.choice = x, choice
        self._levels = {}

    def level(self, k):
        if k not in self._levels:
            self._levels[k] = self._build(k)
        return self._levels[k]

    def _build(self, k):
        cat = self.x[k]
        if 0 in k:
            eta = {y: cat.identity(y) for y in cat.objects}
            return cat, eta, {}
        cube = self.x[_cube(self.x.dim)]
        projs = [self.x.map(a) for a in _cube_projections(k)]
        by_key = {tuple(p.ob(y) for p in projs): y for y in cat.objects}
        eta, kept = {}, []
        for y in cat.objects:
            want = tuple(self.choice[p.ob(y)] for p in projs)
            tgt = by_key.get(tuple(cube.tgt(a) for a in want))
            if tgt is None:
                raise PreconditionError(f"retract at {k!r} is not compatible with the Segal maps")
            arrow = next((a for a in cat.hom(y, tgt) if all(p.ar(a) == w for p, w in zip(projs, want))), None)
            if arrow is None:
                raise PreconditionError(f"no comparison arrow at {k!r} for {y!r}")
            eta[y] = arrow
            if tgt == y:
                kept.append(y)
        sub = FullSubCat(cat, kept, name=f"R{k}")
        return sub, eta, {}

    def inverse(self, k, y):
        cat, eta, inv = self.level(k)
        if y not in inv:
            inv[y] = self.x[k].inverse(eta[y])
        return inv[y]


def transport_to_pseudo(x, choices, name=None):
    """Shrink a strict grid with discrete corners onto levelwise retracts.

    ``choices`` maps an index to ``{object: iso to its representative}``.
    Only the unit cube ``(1, ..., 1)`` may be given: corner entries stay
    fixed pointwise and every other entry is determined through the Segal
    isomorphisms by its cube projections.  The result has entries the full
    subcategories on representatives, ``H(f) = r x(f)`` conjugated by the
    comparison arrows, ``φ_{g,f}(y) = η ∘ x(g)(η^{-1}) ∘ η^{-1}`` and identity
    units.
    """
    cube = _cube(x.dim)
    for k in choices:
        if tuple(k) != cube:
            what = "a corner entry" if 0 in k else "an entry fixed by the Segal maps"
            raise PreconditionError(f"transport choice at {tuple(k)!r} would perturb {what}")
    for k in x.indices():
        if 0 in k and not x[k].is_discrete():
            raise PreconditionError(f"corner entry {k!r} is not discrete")
    choice = dict(choices.get(cube, {}))
    c = x[cube]
    for y in c.objects:
        a = choice.setdefault(y, c.identity(y))
        if c.src(a) != y or not c.is_iso(a):
            raise PreconditionError(f"choice at {y!r} is not an isomorphism out of it")
        if choice.get(c.tgt(a), c.identity(c.tgt(a))) != c.identity(c.tgt(a)):
            raise PreconditionError(f"representative {c.tgt(a)!r} must be sent to itself")
    ret = _Retract(x, choice)

    def entry(k):
        return ret.level(k)[0]

    def fmap(f):
        src, tgt = entry(f.src), entry(f.tgt)
        xf, cod = x.map(f), x[f.tgt]
        eta = ret.level(f.tgt)[1]

        def ob(y):
            return cod.tgt(eta[xf.ob(y)])

        def ar(a):
            s, t = xf.ob(src.src(a)), xf.ob(src.tgt(a))
            return cod.compose(eta[t], cod.compose(xf.ar(a), ret.inverse(f.tgt, s)))

        return Functor(src, tgt, ob, ar)

    def phi(g, f, y):
        cod = x[g.tgt]
        eta_mid = ret.level(f.tgt)[1]
        eta_out = ret.level(g.tgt)[1]
        w = x.map(f).ob(y)
        z = x[f.tgt].tgt(eta_mid[w])
        xg = x.map(g)
        back = xg.ar(ret.inverse(f.tgt, w))
        return cod.compose(
            eta_out[xg.ob(w)], cod.compose(back, ret.inverse(g.tgt, xg.ob(z)))
        )

    return PseudoGrid(x.dim, x.m, entry, fmap, phi, None, name=name or f"transport({x.name})")


# --- n-fold instances -------------------------------------------------------------


def random_eqrel(rng, max_objects=3):
    size = rng.randint(1, max_objects)
    return eqrel_cat(random_partition(rng, range(size)))


MAX_ENTRY_ARROWS = 40


def _top_arrows(x):
    # levels of nerves only grow, so the top entry is the largest
    return len(x[(x.m,) * x.dim].arrows)


def _bounded(rng, make, cap=MAX_ENTRY_ARROWS, tries=200):
    for _ in range(tries):
        x = make(rng)
        if _top_arrows(x) <= cap:
            return x
    raise PreconditionError(f"no instance with entries of at most {cap} arrows")


def gen_hd(spec):
    """A homotopically discrete n-fold category: an external product of equivalence relations."""

    def make(rng):
        cats = [random_eqrel(rng, 2) for _ in range(spec.n - 1)]
        cats.append(random_eqrel(rng, spec.max_objects))
        return external_product(cats, spec.m)

    return _bounded(spec.rng(), make)


def gen_wg(spec):
    """A weakly globular n-fold category built by construction.

    Mixes three families: ``C ⊠ E_2 ⊠ ... ⊠ E_n`` with ``C`` a random
    category and ``E_i`` equivalence relations; for ``n = 2`` the cell grids
    with one object at level zero, and ``[1] ⊠ indiscrete(2)`` with two
    points in its discretized objects.  Entries have at most
    :data:`MAX_ENTRY_ARROWS` arrows.
    """
    return _bounded(spec.rng(), lambda rng: _wg_candidate(spec, rng))


def _wg_candidate(spec, rng):
    # at n = 3 only external products stay within the entry cap
    family = rng.choice(("product", "product", "cells", "ordinal") if spec.n == 2 else ("product",))
    if family == "cells":
        return cell_grid(1, 1, rng.randint(1, 2), spec.m)
    if family == "ordinal":
        return external_product([ordinal_cat(1)] + [indiscrete_cat((0, 1))] * (spec.n - 1), spec.m)
    first = gen_fincat(rng, rng.choice(("discrete", "poset", "monoid", "graph")), max_arrows=8 if spec.n == 2 else 3)
    rest = [random_eqrel(rng, 2) for _ in range(spec.n - 1)]
    return external_product([first] + rest, spec.m)


def nerve_functor(f, level, dom, cod):
    """The functor of discrete categories induced by ``f`` on ``level`` of nerves."""
    return discrete_functor(dom, cod, string_functor(f, level))


def external_map(fs, m=DEFAULT_M, source=None, target=None):
    """``f_1 ⊠ ... ⊠ f_n`` between the external products of the domains and codomains."""
    fs = list(fs)
    x = source or external_product([f.dom for f in fs], m)
    y = target or external_product([f.cod for f in fs], m)

    def component(k):
        parts = [nerve_functor(f, k[i], x[k].factors[i], y[k].factors[i]) for i, f in enumerate(fs[:-1])]
        return product_functor(x[k], y[k], parts + [fs[-1]])

    return GridMap(x, y, component, name="⊠".join(f.name or "f" for f in fs))


def random_eqrel_equivalence(rng, max_objects=3):
    """A random equivalence of equivalence relations: a block-preserving map hitting every block."""
    src_blocks = random_partition(rng, range(rng.randint(1, max_objects)))
    tgt_blocks, offset = [], 0
    for _ in src_blocks:
        size = rng.randint(1, 2)
        tgt_blocks.append(tuple(range(offset, offset + size)))
        offset += size
    mapping = {x: rng.choice(tb) for sb, tb in zip(src_blocks, tgt_blocks) for x in sb}
    src, tgt = eqrel_cat(src_blocks), eqrel_cat(tgt_blocks)
    return Functor(src, tgt, mapping, lambda a: (mapping[a[0]], mapping[a[1]]))


def gen_nequiv_to_hd(spec):
    """A grid map from an n-fold category to a homotopically discrete one, an n-equivalence by construction."""
    rng = spec.rng()
    for _ in range(200):
        fs = [random_eqrel_equivalence(rng, 2) for _ in range(spec.n - 1)]
        fs.append(random_eqrel_equivalence(rng, spec.max_objects))
        f = external_map(fs, spec.m)
        if max(_top_arrows(f.source), _top_arrows(f.target)) <= MAX_ENTRY_ARROWS:
            return f
    raise PreconditionError(f"no map with entries of at most {MAX_ENTRY_ARROWS} arrows")


def random_cospan(rng, max_objects=3):
    """``(f, g)`` with ``f: A -> D <- B: g`` and ``D`` discrete; functors are constant on components."""
    foot = d_discrete(range(rng.randint(1, 3)))

    def leg():
        c = gen_fincat(rng, max_arrows=12)
        comp = q_components(c)
        label = {}
        for x in c.objects:
            label.setdefault(comp(x), rng.choice(foot.objects))
        return Functor(c, foot, lambda x: label[comp(x)], lambda a: ("id", label[comp(c.src(a))]))

    return leg(), leg()


# --- Segalic pseudo-functors -------------------------------------------------------


def gen_segalic(spec):
    """A Segalic pseudo-functor obtained by transport from a strict cell grid.

    For ``n = 2`` the cube entry has ``t`` objects, all isomorphic, and a
    random twisted retract; for ``n = 3`` the cube entry has one object and
    the transport is the identity (larger cube entries leave desk scale).
    """
    rng = spec.rng()
    if spec.n == 2:
        t, q = rng.choice(((1, 2), (2, 1), (3, 1), (2, 2), (3, 2)))
        x = cell_grid(1, t, q, spec.m)
        return transport_to_pseudo(x, {(1,): random_retract(x, rng)})
    if spec.n == 3:
        return transport_to_pseudo(cell_grid(2, 1, rng.randint(1, 2), spec.m), {})
    raise PreconditionError("Segalic instances are generated for n in {2, 3}")


def has_nontrivial_cells(h):
    """True when some coherence cell ``φ`` is not an identity."""
    for g, f in h.index.composable_pairs():
        cat = h[g.tgt]
        for y in h[f.src].objects:
            c = h.phi(g, f, y)
            if c != cat.identity(cat.src(c)):
                return True
    return False


# --- corruption ------------------------------------------------------------------

CORRUPTIONS = {
    "associativity": "a composite in the table is replaced by a parallel arrow",
    "segal": "a composable pair is removed from the nerve, with every simplex having it as a face",
    "corner": "every entry is multiplied by the indiscrete category on two objects",
    "cocycle": "one coherence cell is multiplied by a non-identity automorphism",
}


def corrupt(instance, condition, rng=None):
    """Break exactly ``condition`` (a key of :data:`CORRUPTIONS`) in ``instance``.

    ``associativity`` and ``segal`` take a finite category (``segal``
    returns a corrupted nerve); ``corner`` and ``cocycle`` take a
    :class:`~wgcat.pseudo.PseudoGrid`.  Raises ``PreconditionError`` when
    the instance has no room for the corruption.
    """
    rng = rng or random.Random(0)
    if condition == "associativity":
        return _break_associativity(instance, rng)
    if condition == "segal":
        return _break_segal(instance, rng)
    if condition == "corner":
        return _break_corner(instance)
    if condition == "cocycle":
        return _break_cocycle(instance, rng)
    raise PreconditionError(f"unknown corruption {condition!r}; known: {sorted(CORRUPTIONS)}")


def _non_identity(c, a):
    return a != c.identity(c.src(a))


def _break_associativity(c, rng):
    from .fincat import validate_fincat
    from .errors import CheckFailure

    c = to_fincat(c)
    table = {(g, f): c.compose(g, f) for g, f in c.composable_pairs()}
    spots = [
        (g, f, a)
        for (g, f), gf in table.items()
        if _non_identity(c, g) and _non_identity(c, f)
        for a in c.hom(c.src(f), c.tgt(g))
        if a != gf
    ]
    rng.shuffle(spots)
    for g, f, a in spots:
        bad = dict(table)
        bad[g, f] = a
        out = FinCat(c.objects, c.arrow_table, {x: c.identity(x) for x in c.objects}, bad, name=f"{c.name}~assoc")
        try:
            validate_fincat(out)
        except CheckFailure as e:
            if e.condition == "associativity":
                return out
    raise PreconditionError("no composite can be changed so that only associativity fails")


def _break_segal(c, rng):
    from .simplex import composable_strings, nerve

    pairs = [s for s in composable_strings(c, 2) if all(_non_identity(c, a) for a in s)]
    if not pairs:
        raise PreconditionError("the category has no composable pair of non-identities")
    drop = rng.choice(pairs)
    x = nerve(c)
    kept = {}

    def entry(k):
        if k not in kept:
            full = x[k]
            if k[0] < 2:
                kept[k] = full
            else:
                elems = [s for s in full.objects if not _has_face(c, s, drop)]
                kept[k] = DiscreteCat(elems, name=f"{full.name}~")
        return kept[k]

    def restrict(f, k, k2):
        return discrete_functor(entry(k), entry(k2), f.ob)

    return Grid(
        1,
        x.m,
        entry,
        lambda k, i, j: restrict(x.face(k, i, j), k, (k[0] - 1,)),
        lambda k, i, j: restrict(x.degen(k, i, j), k, (k[0] + 1,)),
        name=f"N({c.name or ''})~segal",
    )


def _has_face(c, s, pair):
    """Whether the string ``s`` has the pair among its iterated faces."""
    if len(s) == 2:
        return tuple(s) == tuple(pair)
    for j in range(len(s) + 1):
        if j == 0:
            t = s[1:]
        elif j == len(s):
            t = s[:-1]
        else:
            t = s[: j - 1] + (c.compose(s[j], s[j - 1]),) + s[j + 1:]
        if _has_face(c, t, pair):
            return True
    return False


def _break_corner(h):
    thick = indiscrete_cat((0, 1), name="I2")
    entries = {}

    def entry(k):
        if k not in entries:
            entries[k] = product(h[k], thick)
        return entries[k]

    def fmap(f):
        hf = h.map(f)
        return Functor(
            entry(f.src),
            entry(f.tgt),
            lambda x: (hf.ob(x[0]), x[1]),
            lambda a: (hf.ar(a[0]), a[1]),
        )

    def phi(g, f, x):
        return (h.phi(g, f, x[0]), thick.identity(x[1]))

    def unit(k, x):
        return (h.unit(k, x[0]), thick.identity(x[1]))

    return PseudoGrid(h.dim, h.m, entry, fmap, phi, unit, name=f"{h.name}~corner")


def _break_cocycle(h, rng):
    """Twist ``φ_{g,f}`` for one pair of non-identity faces by a central automorphism."""
    cands = []
    for g, f in h.index.composable_pairs():
        if not (_is_face(g) and _is_face(f)):
            continue
        cat = h[g.tgt]
        if all(len(cat.hom(y, y)) > 1 for y in cat.objects) and _commutative(cat):
            cands.append((g, f))
    if not cands:
        raise PreconditionError("no pair of faces lands in an entry with central automorphisms")
    g0, f0 = rng.choice(cands)
    cat = h[g0.tgt]
    twist = {y: next(a for a in cat.hom(y, y) if a != cat.identity(y)) for y in cat.objects}

    def phi(g, f, x):
        c = h.phi(g, f, x)
        if (g, f) == (g0, f0):
            return cat.compose(c, twist[cat.src(c)])
        return c

    out = PseudoGrid(h.dim, h.m, h._entry, h._fmap, phi, h._unit, name=f"{h.name}~cocycle")
    out.twisted = (g0, f0)
    return out


def _is_face(a):
    """A composite of face maps other than the identity: injective in every direction."""
    return a.src != a.tgt and all(len(set(v)) == len(v) for v in a.maps)


def _commutative(cat):
    return all(
        cat.compose(a, b) == cat.compose(b, a)
        for y in cat.objects
        for a in cat.hom(y, y)
        for b in cat.hom(y, y)
    )


def gen_corrupted(spec, tries=200):
    """``(base, corrupted)`` for ``spec.target``, drawing bases until the corruption applies."""
    rng = spec.rng()
    for _ in range(tries):
        if spec.target in ("associativity", "segal"):
            flavor = rng.choice(("monoid", "graph", "product", "sum", "poset"))
            base = gen_fincat(rng, flavor, max_arrows=16)
        elif spec.target == "corner":
            # labels play no part here; trivial ones keep validation cheap
            x = cell_grid(1, rng.randint(1, 3), 1, spec.m)
            base = transport_to_pseudo(x, {(1,): random_retract(x, rng)})
        elif spec.target == "cocycle":
            base = gen_segalic(GenSpec(rng.randrange(1 << 30), n=2, m=spec.m, flavor="segalic-transport"))
        else:
            raise PreconditionError(f"unknown corruption {spec.target!r}")
        try:
            return base, corrupt(base, spec.target, rng)
        except PreconditionError:
            continue
    raise PreconditionError(f"no base instance admits the {spec.target} corruption")


def gen_hd_pseudo(spec):
    """A pseudo-functor meeting the hypotheses of the homotopically discrete variant.

    Either a transport of a cell grid with trivial labels (every entry
    collapses to a point), or the nerve of a discrete category on one to
    three objects as a strict pseudo-functor.  A single two-element block
    already pushes the strictification past two minutes.
    """
    from .pseudo import from_grid
    from .simplex import nerve

    rng = spec.rng()
    if rng.random() < 0.4:
        x = cell_grid(1, rng.randint(1, 3), 1, spec.m)
        return transport_to_pseudo(x, {(1,): random_retract(x, rng)})
    size = rng.randint(1, 3)
    return from_grid(nerve(d_discrete(range(size), name=f"D{size}"), spec.m))


def gen_discrete(spec):
    """A discrete n-fold category: the constant grid at a discrete category."""
    from .simplex import constant_grid

    size = spec.rng().randint(1, spec.max_objects)
    return constant_grid(d_discrete(range(size), name=f"D{size}"), spec.n - 1, spec.m, name=f"D{size}")


def generate(spec):
    """The instance a :class:`GenSpec` describes, dispatched on its flavor."""
    if spec.flavor == "discrete":
        return gen_discrete(spec)
    if spec.flavor == "hd":
        return gen_hd(spec)
    if spec.flavor == "wg-strict":
        return gen_wg(spec)
    if spec.flavor == "segalic-transport":
        return gen_segalic(spec)
    if spec.flavor == "corrupted":
        return gen_corrupted(spec)[1]
    raise PreconditionError(f"unknown flavor {spec.flavor!r}; known: {', '.join(FLAVORS)}")
