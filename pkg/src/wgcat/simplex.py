"""Truncated simplicial index categories and multi-simplicial grids of categories.

Directions of a grid are numbered from 1.  An entry of a ``dim``-dimensional
grid is indexed by a tuple ``(k_1, ..., k_dim)`` with ``0 <= k_i <= m``.

Simplicial levels of a nerve use the following ids: level 0 holds objects,
level 1 holds arrows, level ``k >= 2`` holds composable strings
``(a_1, ..., a_k)`` with ``tgt(a_j) == src(a_{j+1})``.  On level 1, ``d_0``
is the target and ``d_1`` the source.
"""

from __future__ import annotations

import itertools
from collections import namedtuple
from dataclasses import dataclass
from functools import cached_property
from math import comb

from .errors import CheckFailure, PreconditionError, TruncationError
from .fincat import (
    Category,
    DiscreteCat,
    Functor,
    PullbackCat,
    compose_functors,
    discrete_functor,
    first_difference,
    identity_functor,
    inverse_functor,
    is_isomorphism,
    p_isoclasses,
    p_map,
    q_components,
    q_map,
)

DEFAULT_M = 3


def check_truncation(m):
    if m < 3:
        raise PreconditionError(f"truncation level must be at least 3, got {m}")
    return m


# --- the truncated simplex category -----------------------------------------

DeltaMap = namedtuple("DeltaMap", "dom cod values")
DeltaMap.__doc__ = "A monotone map ``[dom] -> [cod]``; ``values[i]`` is the image of ``i``."


def monotone_maps(a, b):
    """All monotone maps ``[a] -> [b]`` as value tuples, in lexicographic order."""
    return [tuple(v) for v in itertools.combinations_with_replacement(range(b + 1), a + 1)]


def n_monotone_maps(a, b):
    return comb(a + b + 1, a + 1)


def coface(k, j):
    """``δ_j: [k-1] -> [k]`` missing ``j``."""
    return tuple(i if i < j else i + 1 for i in range(k))


def codegeneracy(k, j):
    """``σ_j: [k+1] -> [k]`` hitting ``j`` twice."""
    return tuple(i if i <= j else i - 1 for i in range(k + 2))


def nu(k, j):
    """``ν_j: [1] -> [k]``, ``0 ↦ j-1``, ``1 ↦ j`` (``1 <= j <= k``)."""
    return (j - 1, j)


def decompose(values, src_level):
    """Split ``θ: [b] -> [a]`` into face and degeneracy indices.

    Returns ``(faces, degens)``: applying ``d_j`` for ``j`` in ``faces`` and
    then ``s_j`` for ``j`` in ``degens`` (both in the given order) realizes
    ``X(θ): X_a -> X_b``.
    """
    image = sorted(set(values))
    faces = [j for j in range(src_level, -1, -1) if j not in image]
    degens = [j for j in range(len(values) - 1) if values[j] == values[j + 1]]
    return faces, degens


class TruncDelta(Category):
    """``Δ`` restricted to ``[0], ..., [m]``; arrows are :class:`DeltaMap` records."""

    def __init__(self, m=DEFAULT_M):
        self.m = m
        self.objects = tuple(range(m + 1))
        self.name = f"Delta<={m}"

    def hom(self, a, b):
        return tuple(DeltaMap(a, b, v) for v in monotone_maps(a, b))

    def src(self, f):
        return f.dom

    def tgt(self, f):
        return f.cod

    def identity(self, a):
        return DeltaMap(a, a, tuple(range(a + 1)))

    def compose(self, g, f):
        if f.cod != g.dom:
            raise KeyError((g, f))
        return DeltaMap(f.dom, g.cod, tuple(g.values[i] for i in f.values))


# --- multi-indices -----------------------------------------------------------

IndexArrow = namedtuple("IndexArrow", "src tgt maps")
IndexArrow.__doc__ = (
    "An arrow ``src -> tgt`` of the opposite of ``Δ^dim``; ``maps[i]`` is the "
    "monotone map ``[tgt_i] -> [src_i]`` (as a value tuple)."
)


def corner(k, r, i):
    """``k(r, i)``: replace the ``i``-th entry (1-based) of ``k`` by ``r``."""
    k = tuple(k)
    return k[: i - 1] + (r,) + k[i:]


def identity_index_arrow(k):
    return IndexArrow(tuple(k), tuple(k), tuple(tuple(range(ki + 1)) for ki in k))


def directional_arrow(k, i, values, r):
    """Index arrow ``k -> k(r, i)`` acting by ``values: [r] -> [k_i]`` in direction ``i``."""
    k = tuple(k)
    maps = tuple(
        tuple(values) if d == i - 1 else tuple(range(k[d] + 1)) for d in range(len(k))
    )
    return IndexArrow(k, corner(k, r, i), maps)


def compose_index(beta, alpha):
    """``beta ∘ alpha`` in the index category (``alpha`` first)."""
    if alpha.tgt != beta.src:
        raise KeyError((beta, alpha))
    maps = tuple(tuple(a[t] for t in b) for a, b in zip(alpha.maps, beta.maps))
    return IndexArrow(alpha.src, beta.tgt, maps)


class IndexCat(Category):
    """``(Δ_{<=m}^dim)^op`` with objects the index tuples."""

    def __init__(self, dim, m=DEFAULT_M):
        self.dim, self.m = dim, m
        self.objects = tuple(itertools.product(range(m + 1), repeat=dim))
        self.name = f"I({dim},{m})"

    def hom(self, k, l):
        per = [monotone_maps(b, a) for a, b in zip(k, l)]
        return tuple(IndexArrow(tuple(k), tuple(l), maps) for maps in itertools.product(*per))

    def hom_size(self, k, l):
        out = 1
        for a, b in zip(k, l):
            out *= n_monotone_maps(b, a)
        return out

    def src(self, f):
        return f.src

    def tgt(self, f):
        return f.tgt

    def identity(self, k):
        return identity_index_arrow(k)

    def compose(self, g, f):
        return compose_index(g, f)


# --- grids -------------------------------------------------------------------


def _lookup(source):
    if source is None or callable(source):
        return source
    return source.__getitem__


class Grid:
    """A truncated ``dim``-simplicial object in finite categories.

    ``entry(k)`` returns the category at index ``k``; ``face(k, i, j)`` the
    functor ``d_j: X(k) -> X(k(k_i - 1, i))`` in direction ``i`` and
    ``degen(k, i, j)`` the functor ``s_j: X(k) -> X(k(k_i + 1, i))``.  Each
    may be a dict or a callable; results are cached.  Every other structure
    map is a composite of these generators (see :meth:`map`).
    """

    def __init__(self, dim, m, entry, face, degen, name=None):
        self.dim, self.m, self.name = dim, m, name
        self._entry, self._face, self._degen = _lookup(entry), _lookup(face), _lookup(degen)
        self._cache = {}

    def indices(self):
        return itertools.product(range(self.m + 1), repeat=self.dim)

    def _check_index(self, k):
        if len(k) != self.dim:
            raise PreconditionError(f"index {k!r} has the wrong length for a {self.dim}-grid")
        if any(not 0 <= ki <= self.m for ki in k):
            raise TruncationError(f"index {k!r} is outside the truncation m={self.m}")

    def _cached(self, key, make):
        try:
            return self._cache[key]
        except KeyError:
            v = self._cache[key] = make()
            return v

    def __getitem__(self, k):
        k = tuple(k)
        self._check_index(k)
        return self._cached(("e", k), lambda: self._entry(k))

    def face(self, k, i, j):
        k = tuple(k)
        self._check_index(k)
        if not 1 <= i <= self.dim or not 0 <= j <= k[i - 1] or k[i - 1] == 0:
            raise PreconditionError(f"no face d_{j} in direction {i} at {k!r}")
        return self._cached(("d", k, i, j), lambda: self._face(k, i, j))

    def degen(self, k, i, j):
        k = tuple(k)
        self._check_index(k)
        if not 1 <= i <= self.dim or not 0 <= j <= k[i - 1]:
            raise PreconditionError(f"no degeneracy s_{j} in direction {i} at {k!r}")
        if k[i - 1] >= self.m:
            raise TruncationError(f"s_{j} at {k!r} leaves the truncation m={self.m}")
        return self._cached(("s", k, i, j), lambda: self._degen(k, i, j))

    def map(self, alpha):
        """``X(alpha)`` for an :class:`IndexArrow`, as a composite of generators."""
        return self._cached(("m", alpha), lambda: self._build_map(alpha))

    def _build_map(self, alpha):
        steps = []
        k = tuple(alpha.src)
        for i in range(1, self.dim + 1):
            faces, degens = decompose(alpha.maps[i - 1], k[i - 1])
            for j in faces:
                steps.append(self.face(k, i, j))
                k = corner(k, k[i - 1] - 1, i)
            for j in degens:
                steps.append(self.degen(k, i, j))
                k = corner(k, k[i - 1] + 1, i)
        if not steps:
            return identity_functor(self[k])
        return compose_functors(*reversed(steps))

    def directional(self, k, i, values, r):
        """``X`` applied to ``values: [r] -> [k_i]`` in direction ``i``."""
        return self.map(directional_arrow(k, i, values, r))

    def generators(self):
        """Yield ``(kind, k, i, j, functor)`` for every stored generator."""
        for k in self.indices():
            for i in range(1, self.dim + 1):
                if k[i - 1] > 0:
                    for j in range(k[i - 1] + 1):
                        yield "d", k, i, j, self.face(k, i, j)
                if k[i - 1] < self.m:
                    for j in range(k[i - 1] + 1):
                        yield "s", k, i, j, self.degen(k, i, j)

    # -- reshaping ------------------------------------------------------------

    def fix(self, i, r):
        """The ``(dim-1)``-grid obtained by fixing direction ``i`` at level ``r``."""
        if not 1 <= i <= self.dim:
            raise PreconditionError(f"direction {i} out of range 1..{self.dim}")

        def ins(k):
            return tuple(k[: i - 1]) + (r,) + tuple(k[i - 1:])

        def out(d):
            return d if d < i else d + 1

        return Grid(
            self.dim - 1,
            self.m,
            lambda k: self[ins(k)],
            lambda k, d, j: self.face(ins(k), out(d), j),
            lambda k, d, j: self.degen(ins(k), out(d), j),
            name=f"{self.name or 'X'}[{i}={r}]",
        )

    def permute(self, perm):
        """Reorder directions: direction ``d`` of the result is direction ``perm[d-1]`` here."""
        perm = tuple(perm)
        if sorted(perm) != list(range(1, self.dim + 1)):
            raise PreconditionError(f"{perm!r} is not a permutation of the directions")

        def back(k):
            out = [0] * self.dim
            for d, p in enumerate(perm):
                out[p - 1] = k[d]
            return tuple(out)

        return Grid(
            self.dim,
            self.m,
            lambda k: self[back(k)],
            lambda k, d, j: self.face(back(k), perm[d - 1], j),
            lambda k, d, j: self.degen(back(k), perm[d - 1], j),
            name=self.name,
        )

    def __repr__(self):
        return f"<Grid {self.name or ''} dim={self.dim} m={self.m}>"


def constant_grid(c, dim, m=DEFAULT_M, name=None):
    """The constant ``dim``-grid at ``c``: every structure map is the identity."""
    ident = identity_functor(c)
    return Grid(dim, m, lambda k: c, lambda k, i, j: ident, lambda k, i, j: ident, name=name)


def grid_from_category(c, m=DEFAULT_M):
    """A category viewed as a 0-dimensional grid."""
    return Grid(0, m, lambda k: c, None, None, name=c.name)


def materialize(x):
    """Force every entry and generator of a grid (useful before timing or serializing)."""
    for k in x.indices():
        x[k].arrows
    for *_, f in x.generators():
        pass
    return x


@dataclass
class GridMap:
    """A morphism of grids: one functor per index, commuting with all generators."""

    source: Grid
    target: Grid
    component: object
    name: str = None

    def __post_init__(self):
        self._get = _lookup(self.component)
        self._cache = {}

    def __getitem__(self, k):
        k = tuple(k)
        if k not in self._cache:
            self._cache[k] = self._get(k)
        return self._cache[k]

    def check_natural(self):
        """Raise :class:`CheckFailure` unless every generator square commutes."""
        x, y = self.source, self.target
        for kind, k, i, j, f in x.generators():
            k2 = corner(k, k[i - 1] + (-1 if kind == "d" else 1), i)
            g = y.face(k, i, j) if kind == "d" else y.degen(k, i, j)
            lhs = compose_functors(self[k2], f)
            rhs = compose_functors(g, self[k])
            diff = first_difference(lhs, rhs)
            if diff is not None:
                raise CheckFailure("grid map naturality", (kind, k, i, j), repr(diff))
        return self


def compose_grid_maps(*fs):
    """``compose_grid_maps(h, g, f)`` is ``h∘g∘f``."""
    return GridMap(
        fs[-1].source,
        fs[0].target,
        lambda k: compose_functors(*(f[k] for f in fs)),
    )


def identity_grid_map(x):
    return GridMap(x, x, lambda k: identity_functor(x[k]), name="id")


# --- nerves ------------------------------------------------------------------


def _unpack(x, k):
    return [x] if k == 1 else list(x)


def _pack(seq):
    return seq[0] if len(seq) == 1 else tuple(seq)


class _StringOps:
    """Face and degeneracy formulas on strings of composable level-1 elements."""

    def __init__(self, src, tgt, comp, unit):
        # comp(a, b) is "b after a"
        self.src, self.tgt, self.comp, self.unit = src, tgt, comp, unit

    def face(self, x, k, j):
        if k == 1:
            return self.tgt(x) if j == 0 else self.src(x)
        s = _unpack(x, k)
        if j == 0:
            s = s[1:]
        elif j == k:
            s = s[:-1]
        else:
            s = s[: j - 1] + [self.comp(s[j - 1], s[j])] + s[j + 1:]
        return _pack(s)

    def degen(self, x, k, j):
        if k == 0:
            return self.unit(x)
        s = _unpack(x, k)
        v = self.src(s[j]) if j < k else self.tgt(s[k - 1])
        return _pack(s[:j] + [self.unit(v)] + s[j:])


def composable_strings(c, k):
    """All strings ``(a_1, ..., a_k)`` of composable arrows of ``c`` (``k >= 2``)."""
    level = [(a,) for a in c.arrows]
    for _ in range(k - 1):
        level = [t + (b,) for t in level for b in c.arrows_out_of(c.tgt(t[-1]))]
    return level


def nerve(c, m=DEFAULT_M):
    """The nerve of a finite category as a 1-grid of discrete categories."""
    ops = _StringOps(c.src, c.tgt, lambda a, b: c.compose(b, a), c.identity)

    def entry(k):
        elems = c.objects if k[0] == 0 else c.arrows if k[0] == 1 else composable_strings(c, k[0])
        return DiscreteCat(elems, name=f"N{k[0]}")

    def face(k, i, j):
        return discrete_functor(x[k], x[(k[0] - 1,)], lambda e: ops.face(e, k[0], j))

    def degen(k, i, j):
        return discrete_functor(x[k], x[(k[0] + 1,)], lambda e: ops.degen(e, k[0], j))

    x = Grid(1, m, entry, face, degen, name=f"N({c.name or ''})")
    return x


@dataclass
class InternalCat:
    """A category object in Cat given by spans: ``d0`` target, ``d1`` source.

    ``comp`` is defined on the pullback ``x1 ×_{x0} x1`` whose objects are
    pairs ``(a, b)`` with ``d0(a) == d1(b)``; it returns "b after a".
    """

    x0: Category
    x1: Category
    d0: Functor
    d1: Functor
    unit: Functor
    comp: Functor = None

    @cached_property
    def pair_cat(self):
        return PullbackCat([self.x1, self.x1], [self.d0], [self.d1])


def _pullback_power(x1, right, left, k):
    if k == 1:
        return x1
    return PullbackCat([x1] * k, [right] * (k - 1), [left] * (k - 1))


def internal_nerve(ic, m=DEFAULT_M):
    """Nerve of an internal category: a 1-grid with entries ``x0, x1, x1×x1, ...``."""
    if ic.comp is None:
        raise PreconditionError("internal category has no composition")
    ob_ops = _StringOps(ic.d1.ob, ic.d0.ob, lambda a, b: ic.comp.ob((a, b)), ic.unit.ob)
    ar_ops = _StringOps(ic.d1.ar, ic.d0.ar, lambda a, b: ic.comp.ar((a, b)), ic.unit.ar)

    def entry(k):
        return ic.x0 if k[0] == 0 else _pullback_power(ic.x1, ic.d0, ic.d1, k[0])

    def face(k, i, j):
        n = k[0]
        return Functor(x[k], x[(n - 1,)], lambda e: ob_ops.face(e, n, j), lambda a: ar_ops.face(a, n, j))

    def degen(k, i, j):
        n = k[0]
        return Functor(x[k], x[(n + 1,)], lambda e: ob_ops.degen(e, n, j), lambda a: ar_ops.degen(a, n, j))

    x = Grid(1, m, entry, face, degen)
    return x


# --- Segal maps --------------------------------------------------------------


def _segal_pullback(x, at, i, legs=None):
    """The iterated pullback ``X(at(1,i)) ×_{X(at(0,i))} ... `` with ``at[i-1]`` factors."""
    k = at[i - 1]
    one, zero = corner(at, 1, i), corner(at, 0, i)
    right, left = x.face(one, i, 0), x.face(one, i, 1)
    if legs is not None:
        right, left = compose_functors(legs, right), compose_functors(legs, left)
    return _pullback_power(x[one], right, left, k)


@dataclass
class SegalMap:
    functor: Functor
    target: Category
    iso: bool


def segal_map(x, at, i=1):
    """The ``k``-th Segal map in direction ``i`` at index ``at`` (``k = at[i-1] >= 2``)."""
    return _segal(x, tuple(at), i, None)


def induced_segal_map(x, at, i, gamma0):
    """The induced Segal map over the discretization ``gamma0: X(at(0,i)) -> X_0^d``."""
    if not gamma0.cod.is_discrete():
        raise PreconditionError("the discretization target must be discrete")
    return _segal(x, tuple(at), i, gamma0)


def _segal(x, at, i, gamma0):
    if not 1 <= i <= x.dim:
        raise PreconditionError(f"direction {i} out of range 1..{x.dim}")
    k = at[i - 1]
    if k > x.m:
        raise TruncationError(f"level {k} exceeds truncation m={x.m}")
    if k < 2:
        raise PreconditionError("Segal maps start at level 2")
    target = _segal_pullback(x, at, i, gamma0)
    nus = [x.directional(at, i, nu(k, j), 1) for j in range(1, k + 1)]
    f = target.tuple_functor(x[at], nus)
    return SegalMap(f, target, is_isomorphism(f))


def is_nerve(x):
    """``(True, InternalCat)`` when all Segal maps of the 1-grid are isomorphisms, else ``(False, k)``."""
    for k in range(2, x.m + 1):
        if not segal_map(x, (k,)).iso:
            return False, k
    mu2 = segal_map(x, (2,)).functor
    ic = InternalCat(x[(0,)], x[(1,)], x.face((1,), 1, 0), x.face((1,), 1, 1), x.degen((0,), 1, 0))
    ic.comp = compose_functors(x.face((2,), 1, 1), inverse_functor(mu2))
    # re-home the composite on the canonical pair category
    ic.comp = Functor(ic.pair_cat, ic.x1, ic.comp.ob, ic.comp.ar, name="comp")
    return True, ic


def multinerve_failure(x):
    """First ``(index, direction)`` whose Segal map is not an isomorphism, or ``None``."""
    for i in range(1, x.dim + 1):
        for at in x.indices():
            if at[i - 1] >= 2 and not segal_map(x, at, i).iso:
                return at, i
    return None


def is_multinerve(x):
    return multinerve_failure(x) is None


# --- levelwise functors ------------------------------------------------------


def apply_levelwise(x, kind="p"):
    """Apply ``p`` (isomorphism classes) or ``q`` (components) entrywise; a grid of sets."""
    quot, induced = {"p": (p_isoclasses, p_map), "q": (q_components, q_map)}[kind]

    def qt(k):
        return y._cached(("quot", k), lambda: quot(x[k]))

    def entry(k):
        return qt(k).discrete()

    def gen(kind2):
        def make(k, i, j):
            f = x.face(k, i, j) if kind2 == "d" else x.degen(k, i, j)
            k2 = corner(k, k[i - 1] + (-1 if kind2 == "d" else 1), i)
            table = induced(f, qt(k), qt(k2))
            return discrete_functor(y[k], y[k2], table)

        return make

    y = Grid(x.dim, x.m, entry, gen("d"), gen("s"), name=f"{kind}({x.name or 'X'})")
    return y


def levelwise_map(f, kind="p", source=None, target=None):
    """The grid map of sets induced by a grid map ``f`` under ``p`` or ``q``."""
    source = source or apply_levelwise(f.source, kind)
    target = target or apply_levelwise(f.target, kind)
    induced = p_map if kind == "p" else q_map
    return GridMap(
        source,
        target,
        lambda k: discrete_functor(source[k], target[k], induced(f[k])),
    )


def reindex(x, i):
    """``ξ_i``: move direction ``i`` to the front, so ``fix(1, r)`` gives the ``r``-th level."""
    perm = (i,) + tuple(d for d in range(1, x.dim + 1) if d != i)
    return x.permute(perm)


def unreindex(y, i):
    """Inverse of :func:`reindex`."""
    perm = tuple(range(2, i + 1)) + (1,) + tuple(range(i + 1, y.dim + 1))
    return y.permute(perm)


# --- validation --------------------------------------------------------------


def _gen(x, kind, k, i, j):
    return x.face(k, i, j) if kind == "d" else x.degen(k, i, j)


def _step(k, i, kind):
    return corner(k, k[i - 1] + (-1 if kind == "d" else 1), i)


def _path(x, k, steps):
    """Compose generators ``[(kind, i, j), ...]`` starting at ``k`` (first step first)."""
    fs = []
    for kind, i, j in steps:
        fs.append(_gen(x, kind, k, i, j))
        k = _step(k, i, kind)
    return compose_functors(*reversed(fs)) if len(fs) > 1 else fs[0]


def _identities(k, i, m):
    """Simplicial identities available at ``k`` in direction ``i`` as pairs of paths."""
    n = k[i - 1]
    out = []
    if n >= 2:
        for a in range(n):
            for b in range(a + 1, n + 1):
                # d_a d_b = d_{b-1} d_a
                out.append(([("d", i, b), ("d", i, a)], [("d", i, a), ("d", i, b - 1)]))
    if n + 1 <= m:
        for j in range(n + 1):
            # d_j s_j = d_{j+1} s_j = id
            out.append(([("s", i, j), ("d", i, j)], None))
            out.append(([("s", i, j), ("d", i, j + 1)], None))
            for a in range(n + 2):
                if a < j:
                    out.append(([("s", i, j), ("d", i, a)], [("d", i, a), ("s", i, j - 1)]))
                elif a > j + 1:
                    out.append(([("s", i, j), ("d", i, a)], [("d", i, a - 1), ("s", i, j)]))
    if n + 2 <= m:
        for a in range(n + 1):
            for b in range(a, n + 1):
                # s_a s_b = s_{b+1} s_a  (a <= b)
                out.append(([("s", i, b), ("s", i, a)], [("s", i, a), ("s", i, b + 1)]))
    return out


def _cross(x, k, i, i2):
    """Commutation of generators in two different directions starting at ``k``."""
    def kinds(d):
        return [t for t in "ds" if (t == "d" and k[d - 1] > 0) or (t == "s" and k[d - 1] < x.m)]

    out = []
    for a in kinds(i):
        for b in kinds(i2):
            for j in range(k[i - 1] + 1):
                for j2 in range(k[i2 - 1] + 1):
                    out.append(([(a, i, j), (b, i2, j2)], [(b, i2, j2), (a, i, j)]))
    return out


def validate_grid(x, check_entries=True, max_arrows=None):
    """Exhaustively check a grid: entries, generator functors, simplicial identities.

    Functoriality on the whole index category follows from the identities
    between generators in each direction and the commutation of generators
    in distinct directions.  Raises :class:`CheckFailure` on the first failure.
    """
    from .fincat import DEFAULT_MAX_ARROWS, validate_fincat, validate_functor

    cap = DEFAULT_MAX_ARROWS if max_arrows is None else max_arrows
    if check_entries:
        for k in x.indices():
            validate_fincat(x[k], max_arrows=cap)
        for kind, k, i, j, f in x.generators():
            if f.dom is not x[k] or f.cod is not x[_step(k, i, kind)]:
                raise CheckFailure("generator endpoints", (kind, k, i, j))
            validate_functor(f, max_arrows=cap)
    for k in x.indices():
        for i in range(1, x.dim + 1):
            for lhs, rhs in _identities(k, i, x.m):
                f = _path(x, k, lhs)
                g = identity_functor(x[k]) if rhs is None else _path(x, k, rhs)
                diff = first_difference(f, g)
                if diff is not None:
                    raise CheckFailure("simplicial identity", (k, i, lhs, rhs), repr(diff))
            for i2 in range(i + 1, x.dim + 1):
                for lhs, rhs in _cross(x, k, i, i2):
                    diff = first_difference(_path(x, k, lhs), _path(x, k, rhs))
                    if diff is not None:
                        raise CheckFailure("directions commute", (k, i, i2, lhs), repr(diff))
    return x


# --- serialization -----------------------------------------------------------


def index_arrow_to_json(a):
    return [list(a.src), list(a.tgt), [list(v) for v in a.maps]]


def index_arrow_from_json(d):
    src, tgt, maps = d
    return IndexArrow(tuple(src), tuple(tgt), tuple(tuple(v) for v in maps))


def grid_to_json(x, max_arrows=None):
    """Plain-JSON dict with every entry and every generator functor as explicit tables."""
    from .fincat import DEFAULT_MAX_ARROWS, fincat_to_json, functor_to_json

    cap = DEFAULT_MAX_ARROWS if max_arrows is None else max_arrows
    return {
        "kind": "grid",
        "name": x.name,
        "dim": x.dim,
        "m": x.m,
        "entries": [[list(k), fincat_to_json(x[k], cap)] for k in x.indices()],
        "generators": [[kind, list(k), i, j, functor_to_json(f)] for kind, k, i, j, f in x.generators()],
    }


def grid_from_json(d):
    """Inverse of :func:`grid_to_json`; raises ``StructuralError`` on malformed records."""
    from .errors import StructuralError
    from .fincat import fincat_from_json, functor_from_json

    try:
        dim, m = int(d["dim"]), int(d["m"])
        entries = {tuple(k): fincat_from_json(c) for k, c in d["entries"]}
        gens = {(kind, tuple(k), i, j): f for kind, k, i, j, f in d["generators"]}
    except (KeyError, TypeError, ValueError) as e:
        raise StructuralError(f"malformed grid record: {e}") from None

    def gen(kind):
        def make(k, i, j):
            try:
                rec = gens[kind, k, i, j]
            except KeyError:
                raise StructuralError(f"missing generator {kind}_{j} in direction {i} at {k!r}") from None
            return functor_from_json(rec, entries[k], entries[_step(k, i, kind)])

        return make

    for k in itertools.product(range(m + 1), repeat=dim):
        if k not in entries:
            raise StructuralError(f"missing entry {k!r}")
    return Grid(dim, m, entries, gen("d"), gen("s"), name=d.get("name"))


def relabel(x):
    """An isomorphic copy of ``x`` with integer ids, numbered per entry in sorted order.

    Returns ``(grid, labels)`` where ``labels[k]`` lists the encoded original
    object ids of entry ``k``.  Useful for grids whose ids are deeply nested.
    """
    from .fincat import FinCat, encode_id, sort_key

    entries, obs, ars, labels = {}, {}, {}, {}
    for k in x.indices():
        c = x[k]
        keys = {}

        def key(a, keys=keys):
            if a not in keys:
                keys[a] = sort_key(a)
            return keys[a]

        o = {y: i for i, y in enumerate(sorted(c.objects, key=key))}
        a = {e: i for i, e in enumerate(sorted(c.arrows, key=key))}
        entries[k] = FinCat(
            range(len(o)),
            {a[e]: (o[c.src(e)], o[c.tgt(e)]) for e in a},
            {o[y]: a[c.identity(y)] for y in o},
            {(a[g], a[f]): a[c.compose(g, f)] for g, f in c.composable_pairs()},
            name=c.name,
        )
        obs[k], ars[k] = o, a
        labels[k] = [encode_id(y) for y in o]

    def gen(kind):
        def make(k, i, j):
            f = x.face(k, i, j) if kind == "d" else x.degen(k, i, j)
            k2 = _step(k, i, kind)
            o, a, o2, a2 = obs[k], ars[k], obs[k2], ars[k2]
            return Functor(
                entries[k],
                entries[k2],
                {o[y]: o2[f.ob(y)] for y in o},
                {a[e]: a2[f.ar(e)] for e in a},
            )

        return make

    return Grid(x.dim, x.m, entries, gen("d"), gen("s"), name=x.name), labels


def map_to_json(f, max_arrows=None):
    """A grid map with both grids and one functor table per index."""
    from .fincat import functor_to_json

    return {
        "kind": "map",
        "name": f.name,
        "source": grid_to_json(f.source, max_arrows),
        "target": grid_to_json(f.target, max_arrows),
        "components": [[list(k), functor_to_json(f[k])] for k in f.source.indices()],
    }


def map_from_json(d):
    from .errors import StructuralError
    from .fincat import functor_from_json

    try:
        x, y = grid_from_json(d["source"]), grid_from_json(d["target"])
        comps = {tuple(k): c for k, c in d["components"]}
    except (KeyError, TypeError, ValueError) as e:
        raise StructuralError(f"malformed grid map record: {e}") from None

    def component(k):
        if k not in comps:
            raise StructuralError(f"missing component at {k!r}")
        return functor_from_json(comps[k], x[k], y[k])

    return GridMap(x, y, component, name=d.get("name"))
