"""Finite categories, functors, natural transformations and the functors q, p, m, d.

Categories are accessed through a small protocol (:class:`Category`): a
finite object list, hom-sets, ``src``/``tgt``, identities and composition.
:class:`FinCat` is the explicit, table-backed implementation; products,
coproducts, pullbacks and full-image categories compute hom-sets on demand
so that the large levels arising in strictification never need a dense
composition table.

Ids are hashable values: strings, ints, or (nested) tuples of those.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CheckFailure, PreconditionError, SizeCapExceeded, StructuralError

DEFAULT_MAX_ARROWS = 10_000


def sort_key(x):
    """Total order over ids of mixed type (ints < strings < tuples)."""
    if isinstance(x, tuple):
        return (2, tuple(sort_key(y) for y in x))
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, int):
        return (0, x)
    return (3, repr(x))


def least(ids):
    return min(ids, key=sort_key)


class Category:
    """Base class for finite categories.

    Subclasses provide ``objects``, ``hom``, ``src``, ``tgt``, ``identity``
    and ``compose(g, f)`` (``g`` after ``f``); they may override
    ``_iter_arrows`` when arrows can be listed faster than by scanning all
    pairs of objects.
    """

    objects: tuple = ()
    name = None

    def hom(self, x, y):
        raise NotImplementedError

    def src(self, a):
        raise NotImplementedError

    def tgt(self, a):
        raise NotImplementedError

    def identity(self, x):
        raise NotImplementedError

    def compose(self, g, f):
        raise NotImplementedError

    def _iter_arrows(self):
        for x in self.objects:
            for y in self.objects:
                yield from self.hom(x, y)

    @cached_property
    def arrows(self):
        return tuple(self._iter_arrows())

    @cached_property
    def object_set(self):
        return frozenset(self.objects)

    @cached_property
    def arrow_set(self):
        return frozenset(self.arrows)

    @cached_property
    def _in_out(self):
        ins, outs = defaultdict(list), defaultdict(list)
        for a in self.arrows:
            outs[self.src(a)].append(a)
            ins[self.tgt(a)].append(a)
        return ins, outs

    def arrows_into(self, y):
        return self._in_out[0].get(y, [])

    def arrows_out_of(self, x):
        return self._in_out[1].get(x, [])

    def n_arrows(self):
        return len(self.arrows)

    def composable_pairs(self):
        """Yield all ``(g, f)`` with ``src(g) == tgt(f)``."""
        for y in self.objects:
            outs = self.arrows_out_of(y)
            for f in self.arrows_into(y):
                for g in outs:
                    yield g, f

    def is_discrete(self):
        return len(self.arrows) == len(self.objects)

    def inverse(self, a):
        """Return the inverse of ``a`` or ``None``."""
        x, y = self.src(a), self.tgt(a)
        ix, iy = self.identity(x), self.identity(y)
        for b in self.hom(y, x):
            if self.compose(b, a) == ix and self.compose(a, b) == iy:
                return b
        return None

    def is_iso(self, a):
        cache = self.__dict__.setdefault("_iso_cache", {})
        try:
            return cache[a]
        except KeyError:
            v = cache[a] = self._is_iso(a)
            return v

    def _is_iso(self, a):
        return self.inverse(a) is not None

    def is_groupoid(self):
        return all(self.is_iso(a) for a in self.arrows)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<{type(self).__name__}{label}: {len(self.objects)} objects>"


class FinCat(Category):
    """A finite category given by explicit tables.

    ``arrows`` maps arrow id -> ``(src, tgt)``; ``identities`` maps object
    id -> arrow id; ``compose`` is either a dict keyed by ``(g, f)`` or a
    callable ``(g, f) -> h``.  Construction does not validate; call
    :func:`validate_fincat`.
    """

    def __init__(self, objects, arrows, identities, compose, name=None):
        self.objects = tuple(objects)
        self._arrows = dict(arrows)
        self._identities = dict(identities)
        if callable(compose):
            self._compose_fn, self._table = compose, None
        else:
            self._compose_fn, self._table = None, dict(compose)
        self.name = name

    @cached_property
    def _hom_index(self):
        index = defaultdict(list)
        for a, (s, t) in self._arrows.items():
            index[s, t].append(a)
        return {k: tuple(v) for k, v in index.items()}

    def hom(self, x, y):
        return self._hom_index.get((x, y), ())

    def src(self, a):
        return self._arrows[a][0]

    def tgt(self, a):
        return self._arrows[a][1]

    def identity(self, x):
        return self._identities[x]

    def compose(self, g, f):
        if self._table is not None:
            return self._table[g, f]
        return self._compose_fn(g, f)

    def _iter_arrows(self):
        return iter(self._arrows)

    @property
    def arrow_table(self):
        return self._arrows


class Functor:
    """A functor between finite categories.

    ``ob`` and ``ar`` are dicts or callables.  Callables are memoised.
    """

    def __init__(self, dom, cod, ob, ar, name=None):
        self.dom, self.cod, self.name = dom, cod, name
        self._ob, self._ar = ob, ar
        # bound once: these lookups sit in the innermost loops of every checker
        self.ob = _lookup_fn(ob)
        self.ar = _lookup_fn(ar)

    def obj_map(self):
        return {x: self.ob(x) for x in self.dom.objects}

    def arr_map(self):
        return {a: self.ar(a) for a in self.dom.arrows}

    def __repr__(self):
        return f"<Functor {self.name or ''} {self.dom!r} -> {self.cod!r}>"


def _lookup_fn(table):
    if not callable(table):
        return table.__getitem__
    cache = {}

    def get(x):
        try:
            return cache[x]
        except KeyError:
            v = cache[x] = table(x)
            return v

    return get


def identity_functor(c):
    return Functor(c, c, lambda x: x, lambda a: a, name="id")


def compose_functors(*fs):
    """``compose_functors(h, g, f)`` is ``h∘g∘f`` (rightmost applied first)."""
    if len(fs) == 1:
        return fs[0]
    first, rest = fs[-1], fs[:-1]

    def ob(x):
        for f in reversed(fs):
            x = f.ob(x)
        return x

    def ar(a):
        for f in reversed(fs):
            a = f.ar(a)
        return a

    return Functor(first.dom, rest[0].cod, ob, ar)


def functors_equal(f, g):
    """Exhaustive comparison of two functors with the same domain."""
    return all(f.ob(x) == g.ob(x) for x in f.dom.objects) and all(
        f.ar(a) == g.ar(a) for a in f.dom.arrows
    )


def first_difference(f, g):
    """Return the first object or arrow on which ``f`` and ``g`` differ, else ``None``."""
    for x in f.dom.objects:
        if f.ob(x) != g.ob(x):
            return ("object", x)
    for a in f.dom.arrows:
        if f.ar(a) != g.ar(a):
            return ("arrow", a)
    return None


def is_isomorphism(f):
    """True iff ``f`` is bijective on objects and on arrows.

    Together these force bijections on every hom-set, since ``f`` sends
    ``hom(x, y)`` into ``hom(f x, f y)``.
    """
    dom, cod = f.dom, f.cod
    if len(dom.objects) != len(cod.objects) or len(dom.arrows) != len(cod.arrows):
        return False
    obs = {f.ob(x) for x in dom.objects}
    if len(obs) != len(cod.objects) or not obs <= cod.object_set:
        return False
    ars = {f.ar(a) for a in dom.arrows}
    return len(ars) == len(dom.arrows) and ars <= cod.arrow_set


@dataclass
class NatTransf:
    """A natural transformation ``source => target`` between parallel functors."""

    source: Functor
    target: Functor
    components: dict

    def component(self, x):
        return self.components[x]

    def check_natural(self):
        cod = self.source.cod
        for x in self.source.dom.objects:
            c = self.components.get(x)
            if c is None:
                raise CheckFailure("missing component", x)
            if cod.src(c) != self.source.ob(x) or cod.tgt(c) != self.target.ob(x):
                raise CheckFailure("component endpoints", x)
        for a in self.source.dom.arrows:
            x, y = self.source.dom.src(a), self.source.dom.tgt(a)
            lhs = cod.compose(self.components[y], self.source.ar(a))
            rhs = cod.compose(self.target.ar(a), self.components[x])
            if lhs != rhs:
                raise CheckFailure("naturality", a)
        return self

    def is_iso(self):
        cod = self.source.cod
        return all(cod.is_iso(c) for c in self.components.values())


# --- constructions -----------------------------------------------------------


class DiscreteCat(Category):
    """The discrete category on a finite set; identity of ``x`` is ``("id", x)``."""

    def __init__(self, elements, name=None):
        self.objects = tuple(elements)
        self.name = name

    def hom(self, x, y):
        return (("id", x),) if x == y and x in self.object_set else ()

    def src(self, a):
        return a[1]

    tgt = src

    def identity(self, x):
        return ("id", x)

    def compose(self, g, f):
        if g != f:
            raise KeyError((g, f))
        return f

    def _iter_arrows(self):
        return (("id", x) for x in self.objects)

    def is_discrete(self):
        return True

    def _is_iso(self, a):
        return True


def d_discrete(elements, name=None):
    """The discrete category functor ``d``: a finite set to its discrete category."""
    return DiscreteCat(elements, name=name)


def discrete_functor(dom, cod, mapping):
    """Functor between discrete categories induced by a map of object sets."""
    get = mapping.__getitem__ if isinstance(mapping, dict) else mapping
    return Functor(dom, cod, get, lambda a: ("id", get(a[1])))


class ProductCat(Category):
    """Finite product of categories; ids are tuples."""

    def __init__(self, factors, name=None):
        self.factors = tuple(factors)
        self.objects = tuple(itertools.product(*(c.objects for c in self.factors)))
        self.name = name

    def hom(self, x, y):
        return tuple(itertools.product(*(c.hom(a, b) for c, a, b in zip(self.factors, x, y))))

    def src(self, a):
        return tuple(c.src(f) for c, f in zip(self.factors, a))

    def tgt(self, a):
        return tuple(c.tgt(f) for c, f in zip(self.factors, a))

    def identity(self, x):
        return tuple(c.identity(o) for c, o in zip(self.factors, x))

    def compose(self, g, f):
        return tuple(c.compose(a, b) for c, a, b in zip(self.factors, g, f))

    def _iter_arrows(self):
        return itertools.product(*(c.arrows for c in self.factors))

    def _is_iso(self, a):
        return all(c.is_iso(f) for c, f in zip(self.factors, a))


def product(c1, c2, *more):
    return ProductCat((c1, c2) + more)


class CoproductCat(Category):
    """Disjoint union; ids are ``(tag, id)`` with tags ``0, 1, ...`` unless given."""

    def __init__(self, summands, tags=None, name=None):
        self.summands = tuple(summands)
        self.tags = tuple(tags) if tags is not None else tuple(range(len(self.summands)))
        self._by_tag = dict(zip(self.tags, self.summands))
        self.objects = tuple((t, x) for t, c in zip(self.tags, self.summands) for x in c.objects)
        self.name = name

    def summand(self, tag):
        return self._by_tag[tag]

    def hom(self, x, y):
        if x[0] != y[0]:
            return ()
        t = x[0]
        return tuple((t, a) for a in self._by_tag[t].hom(x[1], y[1]))

    def src(self, a):
        return (a[0], self._by_tag[a[0]].src(a[1]))

    def tgt(self, a):
        return (a[0], self._by_tag[a[0]].tgt(a[1]))

    def identity(self, x):
        return (x[0], self._by_tag[x[0]].identity(x[1]))

    def compose(self, g, f):
        if g[0] != f[0]:
            raise KeyError((g, f))
        return (g[0], self._by_tag[g[0]].compose(g[1], f[1]))

    def _iter_arrows(self):
        for t, c in zip(self.tags, self.summands):
            for a in c.arrows:
                yield (t, a)

    def injection(self, tag):
        c = self._by_tag[tag]
        return Functor(c, self, lambda x: (tag, x), lambda a: (tag, a))


def coproduct(c1, c2, *more):
    return CoproductCat((c1, c2) + more)


class PullbackCat(Category):
    """Iterated (wide) pullback ``C_1 ×_{E_1} C_2 ×_{E_2} ... ×_{E_{k-1}} C_k``.

    ``right[j]: C_j -> E_j`` and ``left[j]: C_{j+1} -> E_j``.  Objects and
    arrows are k-tuples whose consecutive entries agree in the feet.
    """

    def __init__(self, factors, right, left, name=None):
        self.factors = tuple(factors)
        self.right, self.left = tuple(right), tuple(left)
        k = len(self.factors)
        if len(self.right) != k - 1 or len(self.left) != k - 1:
            raise PreconditionError("a k-fold pullback needs k-1 cospans")
        for j in range(k - 1):
            if self.right[j].dom is not self.factors[j] or self.left[j].dom is not self.factors[j + 1]:
                raise PreconditionError(f"leg {j} has the wrong domain")
            if self.right[j].cod is not self.left[j].cod:
                raise PreconditionError(f"mismatched feet at cospan {j}")
        self.objects = tuple(self._join(lambda c: c.objects, "ob"))
        self.name = name

    def _join(self, items, kind):
        level = [(x,) for x in items(self.factors[0])]
        for j in range(len(self.factors) - 1):
            r, l = self.right[j], self.left[j]
            rmap, lmap = (r.ob, l.ob) if kind == "ob" else (r.ar, l.ar)
            index = defaultdict(list)
            for y in items(self.factors[j + 1]):
                index[lmap(y)].append(y)
            level = [t + (y,) for t in level for y in index.get(rmap(t[-1]), ())]
        return level

    def _iter_arrows(self):
        return iter(self._join(lambda c: c.arrows, "ar"))

    def _is_iso(self, a):
        # functors preserve inverses, so the componentwise inverse lies in the pullback
        return all(c.is_iso(f) for c, f in zip(self.factors, a))

    def hom(self, x, y):
        partial = [(a,) for a in self.factors[0].hom(x[0], y[0])]
        for j in range(1, len(self.factors)):
            r, l = self.right[j - 1], self.left[j - 1]
            nxt = self.factors[j].hom(x[j], y[j])
            partial = [t + (b,) for t in partial for b in nxt if r.ar(t[-1]) == l.ar(b)]
            if not partial:
                return ()
        return tuple(partial)

    def src(self, a):
        return tuple(c.src(f) for c, f in zip(self.factors, a))

    def tgt(self, a):
        return tuple(c.tgt(f) for c, f in zip(self.factors, a))

    def identity(self, x):
        return tuple(c.identity(o) for c, o in zip(self.factors, x))

    def compose(self, g, f):
        return tuple(c.compose(a, b) for c, a, b in zip(self.factors, g, f))

    def projection(self, j):
        return Functor(self, self.factors[j], lambda x: x[j], lambda a: a[j], name=f"pr{j + 1}")

    def projections(self):
        return [self.projection(j) for j in range(len(self.factors))]

    def tuple_functor(self, dom, components):
        """The functor ``dom -> self`` with the given projections (no check)."""
        return Functor(
            dom,
            self,
            lambda x: tuple(f.ob(x) for f in components),
            lambda a: tuple(f.ar(a) for f in components),
        )


def iterated_pullback(factors, right, left):
    """Wide pullback of a zig-zag of cospans; a single factor is returned as is."""
    factors = list(factors)
    if len(factors) == 1:
        return factors[0]
    return PullbackCat(factors, right, left)


def pullback(f, g):
    """General binary pullback ``C ×_E D`` computed as a sub-product."""
    return PullbackCat([f.dom, g.dom], [f], [g])


def pullback_over_discrete(f, g):
    """``C ×_E D`` for discrete ``E``; equals the coproduct over ``x ∈ E`` of ``C_x × D_x``."""
    if f.cod is not g.cod:
        raise PreconditionError("cospan legs must share their codomain")
    if not f.cod.is_discrete():
        raise PreconditionError("pullback_over_discrete requires a discrete foot")
    p = PullbackCat([f.dom, g.dom], [f], [g])
    return p, p.projection(0), p.projection(1)


class FullImageCat(Category):
    """Objects of ``objects`` with ``hom(x, y) = base.hom(h x, h y)``.

    This is the middle category of the bijective-on-objects / fully faithful
    factorization; arrow ids are ``(x, y, a)`` with ``a`` a base arrow.
    """

    def __init__(self, objects, h, base, name=None):
        self.objects = tuple(objects)
        self._h = h if callable(h) else h.__getitem__
        self.base = base
        self.name = name

    def over(self, x):
        return self._h(x)

    @cached_property
    def fibers(self):
        fib = defaultdict(list)
        for x in self.objects:
            fib[self._h(x)].append(x)
        return fib

    def hom(self, x, y):
        return tuple((x, y, a) for a in self.base.hom(self._h(x), self._h(y)))

    def src(self, a):
        return a[0]

    def tgt(self, a):
        return a[1]

    def identity(self, x):
        return (x, x, self.base.identity(self._h(x)))

    def compose(self, g, f):
        if f[1] != g[0]:
            raise KeyError((g, f))
        return (f[0], g[1], self.base.compose(g[2], f[2]))

    def _is_iso(self, a):
        return self.base.is_iso(a[2])

    def _iter_arrows(self):
        fib = self.fibers
        for u, xs in fib.items():
            for v, ys in fib.items():
                h = self.base.hom(u, v)
                if h:
                    for x in xs:
                        for y in ys:
                            for a in h:
                                yield (x, y, a)


def to_fincat(c, name=None, max_arrows=None):
    """Materialize any category as an explicit :class:`FinCat`."""
    if isinstance(c, FinCat):
        return c
    arrows = c.arrows
    if max_arrows is not None and len(arrows) > max_arrows:
        raise SizeCapExceeded(f"{len(arrows)} arrows exceed cap {max_arrows}")
    return FinCat(
        c.objects,
        {a: (c.src(a), c.tgt(a)) for a in arrows},
        {x: c.identity(x) for x in c.objects},
        {(g, f): c.compose(g, f) for g, f in c.composable_pairs()},
        name=name or c.name,
    )


# --- validation --------------------------------------------------------------


def _check_cap(c, max_arrows):
    if max_arrows is not None and len(c.arrows) > max_arrows:
        raise SizeCapExceeded(f"{len(c.arrows)} arrows exceed cap {max_arrows}")


def validate_fincat(c, max_arrows=DEFAULT_MAX_ARROWS):
    """Exhaustively check the category axioms; return ``c`` or raise.

    Dangling ids raise :class:`StructuralError`; axiom failures raise
    :class:`CheckFailure` naming the offending unit, pair or triple.
    """
    _check_cap(c, max_arrows)
    obs = c.object_set
    arrows = set(c.arrows)
    for a in c.arrows:
        if c.src(a) not in obs or c.tgt(a) not in obs:
            raise StructuralError(f"arrow {a!r} has an undeclared endpoint")
    for x in c.objects:
        try:
            i = c.identity(x)
        except KeyError:
            raise StructuralError(f"object {x!r} has no identity") from None
        if i not in arrows:
            raise StructuralError(f"identity of {x!r} is not a declared arrow")
        if c.src(i) != x or c.tgt(i) != x:
            raise CheckFailure("identity endpoints", x)
    for g, f in c.composable_pairs():
        try:
            h = c.compose(g, f)
        except KeyError:
            raise StructuralError(f"composite of {(g, f)!r} is undefined") from None
        if h not in arrows:
            raise StructuralError(f"composite of {(g, f)!r} is not a declared arrow")
        if c.src(h) != c.src(f) or c.tgt(h) != c.tgt(g):
            raise CheckFailure("composite endpoints", (g, f))
    for a in c.arrows:
        if c.compose(a, c.identity(c.src(a))) != a or c.compose(c.identity(c.tgt(a)), a) != a:
            raise CheckFailure("unit", a)
    for g, f in c.composable_pairs():
        gf = c.compose(g, f)
        for h in c.arrows_out_of(c.tgt(g)):
            if c.compose(h, gf) != c.compose(c.compose(h, g), f):
                raise CheckFailure("associativity", (h, g, f))
    return c


def validate_functor(f, max_arrows=DEFAULT_MAX_ARROWS):
    """Exhaustively check that ``f`` is a functor; return ``f`` or raise."""
    dom, cod = f.dom, f.cod
    _check_cap(dom, max_arrows)
    cod_arrows = set(cod.arrows)
    for x in dom.objects:
        if f.ob(x) not in cod.object_set:
            raise StructuralError(f"object {x!r} is sent outside the codomain")
    for a in dom.arrows:
        fa = f.ar(a)
        if fa not in cod_arrows:
            raise StructuralError(f"arrow {a!r} is sent outside the codomain")
        if cod.src(fa) != f.ob(dom.src(a)) or cod.tgt(fa) != f.ob(dom.tgt(a)):
            raise CheckFailure("functor endpoints", a)
    for x in dom.objects:
        if f.ar(dom.identity(x)) != cod.identity(f.ob(x)):
            raise CheckFailure("functor identities", x)
    for g, h in dom.composable_pairs():
        if f.ar(dom.compose(g, h)) != cod.compose(f.ar(g), f.ar(h)):
            raise CheckFailure("functor composition", (g, h))
    return f


# --- the functors q, p, m ----------------------------------------------------


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


class Quotient:
    """A quotient of the object set: class representatives and the projection.

    Each class is represented by its least member under :func:`sort_key`.
    ``proj`` is a dict or a callable.
    """

    def __init__(self, elements, proj, members=None):
        self.elements = tuple(elements)
        self.proj = proj
        self._get = proj if callable(proj) else proj.__getitem__
        self._members = members

    def __len__(self):
        return len(self.elements)

    def __call__(self, x):
        return self._get(x)

    def __repr__(self):
        return f"Quotient({len(self.elements)} classes)"

    def classes(self, objects=None):
        """Map each representative to its members (``objects`` needed for a callable projection)."""
        objects = objects if objects is not None else self._members
        if objects is None:
            objects = self.proj.keys()
        out = defaultdict(list)
        for x in objects:
            out[self(x)].append(x)
        return dict(out)

    def discrete(self, name=None):
        return DiscreteCat(self.elements, name=name)


def _quotient(objects, pairs):
    uf = _UnionFind(objects)
    for x, y in pairs:
        uf.union(x, y)
    groups = defaultdict(list)
    for x in objects:
        groups[uf.find(x)].append(x)
    proj = {}
    for members in groups.values():
        rep = least(members)
        for x in members:
            proj[x] = rep
    return Quotient(tuple(sorted(set(proj.values()), key=sort_key)), proj)


def q_components(c):
    """Path components of ``c``: objects joined by a zig-zag of arrows."""
    return _quotient(c.objects, ((c.src(a), c.tgt(a)) for a in c.arrows))


def _discrete_feet(c):
    return all(f.cod.is_discrete() for f in c.right)


def p_isoclasses(c):
    """Isomorphism classes of objects of ``c``.

    For products, and for pullbacks over discrete feet, the classes are
    computed factorwise: ``p`` preserves these limits, and the least member
    of a product of classes is the tuple of least members.
    """
    if isinstance(c, ProductCat) or (isinstance(c, PullbackCat) and _discrete_feet(c)):
        return _p_factorwise(c)
    pairs = []
    for a in c.arrows:
        x, y = c.src(a), c.tgt(a)
        if x != y and c.is_iso(a):
            pairs.append((x, y))
    return _quotient(c.objects, pairs)


class SubCat(Category):
    """The subcategory of ``base`` on all objects and the arrows satisfying ``keep``."""

    def __init__(self, base, keep, name=None):
        self.base, self._keep = base, keep
        self.objects = base.objects
        self.name = name

    def hom(self, x, y):
        return tuple(a for a in self.base.hom(x, y) if self._keep(a))

    def src(self, a):
        return self.base.src(a)

    def tgt(self, a):
        return self.base.tgt(a)

    def identity(self, x):
        return self.base.identity(x)

    def compose(self, g, f):
        return self.base.compose(g, f)

    def _iter_arrows(self):
        return (a for a in self.base.arrows if self._keep(a))


def _p_factorwise(c):
    qs = [p_isoclasses(f) for f in c.factors]
    if isinstance(c, ProductCat):
        elements = itertools.product(*(q.elements for q in qs))
    else:
        level = [(r,) for r in qs[0].elements]
        for j in range(len(c.factors) - 1):
            r, l = c.right[j], c.left[j]
            index = defaultdict(list)
            for e in qs[j + 1].elements:
                index[l.ob(e)].append(e)
            level = [t + (e,) for t in level for e in index.get(r.ob(t[-1]), ())]
        elements = level
    return Quotient(
        sorted(elements, key=sort_key),
        lambda x: tuple(q(o) for q, o in zip(qs, x)),
        members=None,
    )


def m_maxgroupoid(c):
    """The maximal subgroupoid: same objects, exactly the invertible arrows."""
    inv = {a for a in c.arrows if c.is_iso(a)}
    return SubCat(c, inv.__contains__)


def q_map(f, qd=None, qc=None):
    """The map of component sets induced by a functor, as a dict."""
    qd = qd or q_components(f.dom)
    qc = qc or q_components(f.cod)
    return {r: qc(f.ob(r)) for r in qd.elements}


def p_map(f, pd=None, pc=None):
    """The map of isomorphism-class sets induced by a functor, as a dict."""
    pd = pd or p_isoclasses(f.dom)
    pc = pc or p_isoclasses(f.cod)
    return {r: pc(f.ob(r)) for r in pd.elements}


def is_equivalence_relation_cat(c):
    """True iff every hom-set has at most one arrow and every arrow is invertible."""
    for x in c.objects:
        for y in c.objects:
            h = c.hom(x, y)
            if len(h) > 1:
                return False
            if h and not c.hom(y, x):
                return False
    return True


# --- equivalences ------------------------------------------------------------


@dataclass
class EquivCertificate:
    """Explicit evidence that ``functor`` is an equivalence of categories.

    ``witness_ff[(x, y)]`` maps each arrow of ``hom(x, y)`` to its image (the
    table must be a bijection onto ``hom(F x, F y)``); ``witness_eso[z]`` is a
    pair ``(x, iso)`` with ``iso: F x -> z`` invertible.
    """

    functor: Functor
    witness_ff: dict = field(repr=False)
    witness_eso: dict = field(repr=False)

    def verify(self):
        f = self.functor
        dom, cod = f.dom, f.cod
        for x in dom.objects:
            for y in dom.objects:
                table = self.witness_ff.get((x, y))
                if table is None:
                    raise CheckFailure("missing hom table", (x, y))
                if set(table) != set(dom.hom(x, y)):
                    raise CheckFailure("hom table domain", (x, y))
                if any(f.ar(a) != b for a, b in table.items()):
                    raise CheckFailure("hom table disagrees with functor", (x, y))
                target = cod.hom(f.ob(x), f.ob(y))
                if len(set(table.values())) != len(table) or set(table.values()) != set(target):
                    raise CheckFailure("not a bijection on homs", (x, y))
        for z in cod.objects:
            w = self.witness_eso.get(z)
            if w is None:
                raise CheckFailure("missing surjectivity witness", z)
            x, iso = w
            if cod.src(iso) != f.ob(x) or cod.tgt(iso) != z or not cod.is_iso(iso):
                raise CheckFailure("bad surjectivity witness", z)
        return True


def check_equivalence(f):
    """Build an :class:`EquivCertificate` or raise :class:`CheckFailure`.

    Failure tags: ``"not faithful"``/``"not full"`` with the offending pair of
    domain objects, or ``"not essentially surjective"`` with an unreached
    codomain object.
    """
    dom, cod = f.dom, f.cod
    ff = {}
    for x in dom.objects:
        fx = f.ob(x)
        for y in dom.objects:
            h = dom.hom(x, y)
            table = {a: f.ar(a) for a in h}
            if len(set(table.values())) != len(h):
                raise CheckFailure("not faithful", (x, y))
            if len(h) != len(cod.hom(fx, f.ob(y))):
                raise CheckFailure("not full", (x, y))
            ff[x, y] = table
    image = {}
    for x in dom.objects:
        image.setdefault(f.ob(x), x)
    # reach each class through the iso-class projection rather than by
    # scanning every arrow of a possibly huge codomain
    cls = p_isoclasses(cod)
    hit = {}
    for y in image:
        hit.setdefault(cls(y), y)
    eso = {}
    for z in cod.objects:
        if z in image:
            eso[z] = (image[z], cod.identity(z))
            continue
        y = hit.get(cls(z))
        iso = None if y is None else next((a for a in cod.hom(y, z) if cod.is_iso(a)), None)
        if iso is None:
            raise CheckFailure("not essentially surjective", z)
        eso[z] = (image[y], iso)
    return EquivCertificate(f, ff, eso)


def is_equivalence(f):
    try:
        check_equivalence(f)
    except CheckFailure:
        return False
    return True


def bo_ff_factorize(f):
    """Factor ``f = g∘v`` with ``v`` bijective on objects and ``g`` fully faithful.

    The middle category is ``FullImageCat(dom.objects, f.ob, cod)``.
    """
    mid = FullImageCat(f.dom.objects, f.ob, f.cod)
    dom = f.dom
    v = Functor(dom, mid, lambda x: x, lambda a: (dom.src(a), dom.tgt(a), f.ar(a)), name="v")
    g = Functor(mid, f.cod, f.ob, lambda a: a[2], name="g")
    return v, g


# --- serialization -----------------------------------------------------------


def encode_id(x):
    """JSON form of an id: tuples become lists."""
    if isinstance(x, tuple):
        return [encode_id(y) for y in x]
    return x


def decode_id(x):
    if isinstance(x, list):
        return tuple(decode_id(y) for y in x)
    return x


def fincat_to_json(c, max_arrows=DEFAULT_MAX_ARROWS):
    """Plain-JSON dict; composition is a list of ``[g, f, g∘f]`` triples."""
    _check_cap(c, max_arrows)
    # ids can be deeply nested, so keys and encodings are computed once per id
    keys, codes = {}, {}

    def key(x):
        k = keys.get(x)
        if k is None:
            k = keys[x] = sort_key(x)
        return k

    def enc(x):
        e = codes.get(x)
        if e is None:
            e = codes[x] = encode_id(x)
        return e

    objects = sorted(c.objects, key=key)
    arrows = sorted(c.arrows, key=key)
    pairs = sorted(c.composable_pairs(), key=lambda p: (key(p[0]), key(p[1])))
    return {
        "name": c.name,
        "objects": [enc(x) for x in objects],
        "arrows": [[enc(a), enc(c.src(a)), enc(c.tgt(a))] for a in arrows],
        "identity": [[enc(x), enc(c.identity(x))] for x in objects],
        "compose": [[enc(g), enc(f), enc(c.compose(g, f))] for g, f in pairs],
    }


def fincat_from_json(d):
    try:
        objects = [decode_id(x) for x in d["objects"]]
        arrows = {decode_id(a): (decode_id(s), decode_id(t)) for a, s, t in d["arrows"]}
        identities = {decode_id(x): decode_id(i) for x, i in d["identity"]}
        compose = {(decode_id(g), decode_id(f)): decode_id(h) for g, f, h in d["compose"]}
    except (KeyError, TypeError, ValueError) as e:
        raise StructuralError(f"malformed category record: {e}") from None
    return FinCat(objects, arrows, identities, compose, name=d.get("name"))


def functor_to_json(f):
    return {
        "ob": [[encode_id(x), encode_id(f.ob(x))] for x in sorted(f.dom.objects, key=sort_key)],
        "ar": [[encode_id(a), encode_id(f.ar(a))] for a in sorted(f.dom.arrows, key=sort_key)],
    }


def functor_from_json(d, dom, cod):
    try:
        ob = {decode_id(x): decode_id(y) for x, y in d["ob"]}
        ar = {decode_id(a): decode_id(b) for a, b in d["ar"]}
    except (KeyError, TypeError, ValueError) as e:
        raise StructuralError(f"malformed functor record: {e}") from None
    return Functor(dom, cod, ob, ar)


# --- small builders ----------------------------------------------------------


def from_graph(objects, generators, relations=(), name=None):
    """Free category on a finite acyclic graph, modulo path equations.

    ``generators`` maps a name to ``(src, tgt)``.  Arrows are the paths
    (tuples of generator names, first step first); ``relations`` is a list
    of pairs of paths to identify.  Intended for small test categories.
    """
    paths = {(x, x): [()] for x in objects}
    frontier = [((g,), s, t) for g, (s, t) in generators.items()]
    seen = set()
    while frontier:
        nxt = []
        for p, s, t in frontier:
            if p in seen:
                continue
            if len(p) > len(objects) + len(generators):
                raise PreconditionError("graph has a cycle; use FinCat directly")
            seen.add(p)
            paths.setdefault((s, t), []).append(p)
            for g, (s2, t2) in generators.items():
                if s2 == t:
                    nxt.append((p + (g,), s, t2))
        frontier = nxt
    uf = _UnionFind([(s, t, p) for (s, t), ps in paths.items() for p in ps])
    ends = {p: (s, t) for (s, t), ps in paths.items() for p in ps if p}
    changed = True
    rel = [(tuple(a), tuple(b)) for a, b in relations]
    while changed:
        changed = False
        for a, b in rel:
            s, t = ends[a]
            for (s0, t0), ps in paths.items():
                for p in ps:
                    for i in range(len(p) - len(a) + 1):
                        if p[i:i + len(a)] == a:
                            q = p[:i] + b + p[i + len(a):]
                            key_p, key_q = (s0, t0, p), (s0, t0, q)
                            if key_q in uf.parent and uf.find(key_p) != uf.find(key_q):
                                uf.union(key_p, key_q)
                                changed = True
    rep = {}
    groups = defaultdict(list)
    for k in uf.parent:
        groups[uf.find(k)].append(k)
    for members in groups.values():
        r = min(members, key=lambda k: (len(k[2]), sort_key(k[2])))
        for k in members:
            rep[k] = r
    name_of = {}
    for s, t, p in set(rep.values()):
        name_of[s, t, p] = ("id", s) if not p else p[0] if len(p) == 1 else p
    arrows = {name_of[k]: (k[0], k[1]) for k in name_of}
    identities = {x: ("id", x) for x in objects}
    by_name = {v: k for k, v in name_of.items()}

    def compose(g, f):
        s, m, pf = by_name[f]
        m2, t, pg = by_name[g]
        if m != m2:
            raise KeyError((g, f))
        return name_of[rep[s, t, pf + pg]]

    return FinCat(objects, arrows, identities, compose, name=name)


def monoid_cat(elements, mult, unit, obj="*", name=None):
    """One-object category of a finite monoid; ``mult(g, f)`` is ``g∘f``."""
    elements = tuple(elements)
    table = {(g, f): mult(g, f) for g in elements for f in elements}
    return FinCat([obj], {e: (obj, obj) for e in elements}, {obj: unit}, table, name=name)


def cyclic_group_cat(n, name=None):
    return monoid_cat(range(n), lambda g, f: (g + f) % n, 0, name=name or f"Z/{n}")


def indiscrete_cat(objects, name=None):
    """Exactly one arrow ``(x, y)`` between any two objects."""
    objects = tuple(objects)
    arrows = {(x, y): (x, y) for x in objects for y in objects}
    return FinCat(
        objects,
        arrows,
        {x: (x, x) for x in objects},
        lambda g, f: (f[0], g[1]),
        name=name,
    )


def ordinal_cat(k, name=None):
    """The poset ``0 < 1 < ... < k`` as a category; arrows are pairs ``(i, j)``, ``i <= j``."""
    objects = tuple(range(k + 1))
    arrows = {(i, j): (i, j) for i in objects for j in objects if i <= j}
    return FinCat(objects, arrows, {i: (i, i) for i in objects}, lambda g, f: (f[0], g[1]), name=name)


def terminal_cat():
    return DiscreteCat(["*"])


def inverse_functor(f):
    """Inverse of an isomorphism of categories (checked with :func:`is_isomorphism`)."""
    if not is_isomorphism(f):
        raise CheckFailure("not an isomorphism", f.name)
    ob = {f.ob(x): x for x in f.dom.objects}
    ar = {f.ar(a): a for a in f.dom.arrows}
    return Functor(f.cod, f.dom, ob, ar)


def same_category(c, d):
    """Equality of categories as data: same objects, arrows, endpoints, units and composites."""
    if c.object_set != d.object_set or set(c.arrows) != set(d.arrows):
        return False
    if any(c.src(a) != d.src(a) or c.tgt(a) != d.tgt(a) for a in c.arrows):
        return False
    if any(c.identity(x) != d.identity(x) for x in c.objects):
        return False
    return all(c.compose(g, f) == d.compose(g, f) for g, f in c.composable_pairs())


class FullSubCat(Category):
    """The full subcategory of ``base`` on the given objects."""

    def __init__(self, base, objects, name=None):
        self.base = base
        self.objects = tuple(objects)
        self.name = name

    def hom(self, x, y):
        return self.base.hom(x, y)

    def src(self, a):
        return self.base.src(a)

    def tgt(self, a):
        return self.base.tgt(a)

    def identity(self, x):
        return self.base.identity(x)

    def compose(self, g, f):
        return self.base.compose(g, f)

    def _is_iso(self, a):
        return self.base.is_iso(a)


def restrict_functor(f, dom, cod):
    """``f`` viewed between subcategories ``dom`` and ``cod`` (ids unchanged)."""
    return Functor(dom, cod, f.ob, f.ar, name=f.name)


def product_functor(dom, cod, fs):
    """Componentwise functor ``dom = ∏ C_i -> cod = ∏ D_i`` from functors ``f_i: C_i -> D_i``."""
    fs = tuple(fs)
    return Functor(
        dom,
        cod,
        lambda x: tuple(f.ob(c) for f, c in zip(fs, x)),
        lambda a: tuple(f.ar(c) for f, c in zip(fs, a)),
    )
