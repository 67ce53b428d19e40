"""n-fold categories stored as grids of categories, and the operations on them.

An n-fold category is kept as its image under ``J_n``: an ``(n-1)``-grid of
finite categories obtained by taking nerves in the first ``n-1`` directions.
The remaining direction lives inside the entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CheckFailure, PreconditionError
from .fincat import (
    DiscreteCat,
    FinCat,
    Functor,
    FullSubCat,
    ProductCat,
    identity_functor,
    product_functor,
    restrict_functor,
    same_category,
)
from .simplex import (
    DEFAULT_M,
    Grid,
    corner,
    internal_nerve,
    multinerve_failure,
    nerve,
    reindex,
    segal_map,
    unreindex,
    validate_grid,
)


@dataclass
class NFoldCat:
    """A validated n-fold category: its ``J_n`` grid and the Segal witnesses."""

    grid: Grid
    certificate: list = field(default_factory=list)

    @property
    def n(self):
        return self.grid.dim + 1

    @property
    def m(self):
        return self.grid.m

    def __getitem__(self, k):
        return self.grid[k]


def validate_nfold(x, check_entries=True, max_arrows=None):
    """Check that the grid ``x`` is the ``J_n`` image of an n-fold category.

    Every directional Segal map must be an isomorphism.  The certificate
    lists ``(index, direction)`` for each verified Segal isomorphism.
    """
    validate_grid(x, check_entries=check_entries, max_arrows=max_arrows)
    bad = multinerve_failure(x)
    if bad is not None:
        raise CheckFailure("segal", bad, "Segal map is not an isomorphism")
    cert = [
        (k, i) for i in range(1, x.dim + 1) for k in x.indices() if k[i - 1] >= 2
    ]
    return NFoldCat(x, cert)


def as_grid(x):
    return x.grid if isinstance(x, NFoldCat) else x


# --- multinerves -------------------------------------------------------------


def string_functor(f, level):
    """The map induced by ``f`` on level ``level`` of nerves."""
    if level == 0:
        return f.ob
    if level == 1:
        return f.ar
    return lambda s: tuple(f.ar(a) for a in s)


def multinerve(x):
    """Nerve in the last direction too: a ``dim+1`` grid of discrete categories."""
    x = as_grid(x)
    d = x.dim
    nerves = {}

    def nv(k):
        if k not in nerves:
            nerves[k] = nerve(x[k], x.m)
        return nerves[k]

    def entry(k):
        return nv(k[:d])[k[d:]]

    def face(k, i, j):
        if i == d + 1:
            return nv(k[:d]).face(k[d:], 1, j)
        g = string_functor(x.face(k[:d], i, j), k[d])
        return _discrete(y[k], y[corner(k, k[i - 1] - 1, i)], g)

    def degen(k, i, j):
        if i == d + 1:
            return nv(k[:d]).degen(k[d:], 1, j)
        g = string_functor(x.degen(k[:d], i, j), k[d])
        return _discrete(y[k], y[corner(k, k[i - 1] + 1, i)], g)

    y = Grid(d + 1, x.m, entry, face, degen, name=f"N({x.name or 'X'})")
    return y


def _discrete(dom, cod, g):
    return Functor(dom, cod, g, lambda a: ("id", g(a[1])))


def from_multinerve(y):
    """Rebuild categories along the last direction of a grid of sets."""
    d = y.dim - 1

    def entry(k):
        obs = y[k + (0,)].objects
        ars = y[k + (1,)].objects
        tgt = y.face(k + (1,), d + 1, 0).ob
        src = y.face(k + (1,), d + 1, 1).ob
        unit = y.degen(k + (0,), d + 1, 0).ob
        d0, d1, d2 = (y.face(k + (2,), d + 1, j).ob for j in range(3))
        table = {}
        for s in y[k + (2,)].objects:
            key = (d0(s), d2(s))
            if key in table:
                raise CheckFailure("segal", k + (2,), "two 2-simplices over one composable pair")
            table[key] = d1(s)
        arrows = {a: (src(a), tgt(a)) for a in ars}
        for g in ars:
            for f in ars:
                if src(g) == tgt(f) and (g, f) not in table:
                    raise CheckFailure("segal", k + (2,), "composable pair without a 2-simplex")
        return FinCat(obs, arrows, {o: unit(o) for o in obs}, table)

    def gen(kind):
        def make(k, i, j):
            step = -1 if kind == "d" else 1
            get = y.face if kind == "d" else y.degen
            return Functor(
                x[k],
                x[corner(k, k[i - 1] + step, i)],
                get(k + (0,), i, j).ob,
                get(k + (1,), i, j).ob,
            )

        return make

    x = Grid(d, y.m, entry, gen("d"), gen("s"))
    return x


def grids_equal(x, y):
    """Entrywise and generator-wise equality of two grids as data."""
    if x.dim != y.dim or x.m != y.m:
        return False
    for k in x.indices():
        if not same_category(x[k], y[k]):
            return False
    for kind, k, i, j, f in x.generators():
        g = y.face(k, i, j) if kind == "d" else y.degen(k, i, j)
        if any(f.ob(o) != g.ob(o) for o in x[k].objects):
            return False
        if any(f.ar(a) != g.ar(a) for a in x[k].arrows):
            return False
    return True


# --- direction swaps ---------------------------------------------------------


def xi_swap(x, k):
    """``ξ_k``: the grid with direction ``k`` moved to the front.

    ``fix(1, r)`` of the result is the ``r``-th level of the internal
    category in direction ``k``.  For ``k = n`` the categories are rebuilt
    along direction ``n-1``, whose levels ``>= 2`` then carry string ids;
    ``xi_unswap(xi_swap(x, n), n)`` is exactly ``x`` when ``x`` already uses
    string ids there (see :func:`normalize`) and is otherwise related to
    ``x`` by the Segal isomorphisms.
    """
    x = as_grid(x)
    n = x.dim + 1
    if not 1 <= k <= n or n < 2:
        raise PreconditionError(f"direction {k} out of range 1..{n}")
    if k < n:
        return reindex(x, k)
    y = multinerve(x)
    return from_multinerve(y.permute((n,) + tuple(range(1, n))))


def xi_unswap(z, k):
    """Inverse of :func:`xi_swap`."""
    n = z.dim + 1
    if not 1 <= k <= n or n < 2:
        raise PreconditionError(f"direction {k} out of range 1..{n}")
    if k < n:
        return unreindex(z, k)
    y = multinerve(z)
    return from_multinerve(y.permute(tuple(range(2, n + 1)) + (1,)))


def normalize(x):
    """Relabel levels ``>= 2`` of direction ``n-1`` by strings of level-1 ids."""
    x = as_grid(x)
    return xi_unswap(xi_swap(x, x.dim + 1), x.dim + 1)


def nerve_direction(x, k):
    """The nerve in direction ``k``: a simplicial object whose ``r``-th level is ``fix(1, r)``."""
    return xi_swap(x, k)


def j_embed(x):
    return as_grid(x)


def double_from_internal(ic, m=DEFAULT_M):
    """The ``J_2`` grid of the double category given by an internal category in Cat."""
    return internal_nerve(ic, m)


def external_product(cats, m=DEFAULT_M):
    """The n-fold category ``C_1 ⊠ ... ⊠ C_n`` whose multinerve is the product of nerves."""
    cats = list(cats)
    d = len(cats) - 1
    nerves = [nerve(c, m) for c in cats[:-1]]

    def factors(k):
        return [nerves[i][(k[i],)] for i in range(d)] + [cats[-1]]

    def entry(k):
        return ProductCat(factors(k))

    def gen(kind):
        def make(k, i, j):
            step = -1 if kind == "d" else 1
            k2 = corner(k, k[i - 1] + step, i)
            fs = [
                (nerves[t].face if kind == "d" else nerves[t].degen)((k[t],), 1, j)
                if t == i - 1
                else identity_functor(nerves[t][(k[t],)])
                for t in range(d)
            ] + [identity_functor(cats[-1])]
            return product_functor(x[k], x[k2], fs)

        return make

    x = Grid(d, m, entry, gen("d"), gen("s"), name="⊠".join(c.name or "C" for c in cats))
    return x


# --- discrete n-fold categories ----------------------------------------------


def discrete_inclusion(x):
    """``d^{(n)}``: an (n-1)-fold category viewed as discrete in the new last direction."""
    return multinerve(x)


def objects_grid(x):
    """Left inverse of :func:`discrete_inclusion`: keep only objects in the last direction."""
    x = as_grid(x)

    def gen(kind):
        def make(k, i, j):
            f = x.face(k, i, j) if kind == "d" else x.degen(k, i, j)
            step = -1 if kind == "d" else 1
            return _discrete(y[k], y[corner(k, k[i - 1] + step, i)], f.ob)

        return make

    y = Grid(x.dim, x.m, lambda k: DiscreteCat(x[k].objects), gen("d"), gen("s"))
    return from_multinerve(y)


def is_discrete_nfold(x):
    """True iff the multinerve is constant: equal discrete entries, identity structure maps."""
    x = as_grid(x)
    base = x[(0,) * x.dim]
    if not base.is_discrete():
        return False
    for k in x.indices():
        if not same_category(x[k], base):
            return False
    for kind, k, i, j, f in x.generators():
        if any(f.ob(o) != o for o in base.objects):
            return False
    return True


# --- hom fibers --------------------------------------------------------------


def _corner_maps(x):
    """Source and target grid components ``X_1 -> X_0`` (``d_1`` and ``d_0`` in direction 1)."""

    def ins(k, r):
        return (r,) + tuple(k)

    def src(k):
        return x.face(ins(k, 1), 1, 1)

    def tgt(k):
        return x.face(ins(k, 1), 1, 0)

    return src, tgt


def hom_fiber(x, a, b, gamma):
    """``X(a, b)``: the part of ``X_1`` whose sources lie over ``a`` and targets over ``b``.

    ``gamma`` maps ``X_0`` (the level-0 slice in direction 1) to its
    discretization: ``gamma[k]`` is a functor ``X_0(k) -> X_0^d``.
    """
    x = as_grid(x)
    x1 = x.fix(1, 1)
    src, tgt = _corner_maps(x)
    points = set(gamma[(0,) * x1.dim].cod.objects)
    if a not in points or b not in points:
        raise PreconditionError(f"({a!r}, {b!r}) is not a pair of points of X_0^d")

    def over(k, o):
        g = gamma[k]
        return g.ob(src(k).ob(o)) == a and g.ob(tgt(k).ob(o)) == b

    def entry(k):
        return FullSubCat(x1[k], [o for o in x1[k].objects if over(k, o)], name=f"X({a},{b})")

    def gen(kind):
        def make(k, i, j):
            f = x1.face(k, i, j) if kind == "d" else x1.degen(k, i, j)
            step = -1 if kind == "d" else 1
            return restrict_functor(f, y[k], y[corner(k, k[i - 1] + step, i)])

        return make

    y = Grid(x1.dim, x.m, entry, gen("d"), gen("s"), name=f"X({a},{b})")
    return y


def fiber_decomposition_holds(x, gamma):
    """Check that ``X_1`` is the disjoint union of the fibers ``X(a, b)`` entrywise."""
    x = as_grid(x)
    x1 = x.fix(1, 1)
    points = gamma[(0,) * x1.dim].cod.objects
    fibers = [hom_fiber(x, a, b, gamma) for a in points for b in points]
    for k in x1.indices():
        seen = []
        for f in fibers:
            seen.extend(f[k].objects)
        if len(seen) != len(set(seen)) or set(seen) != x1[k].object_set:
            return False
        arrows = sum(len(f[k].arrows) for f in fibers)
        if arrows != len(x1[k].arrows):
            return False
    return True
