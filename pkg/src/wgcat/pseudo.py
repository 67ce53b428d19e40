"""Pseudo-functors on the truncated multi-simplicial index category.

A :class:`PseudoGrid` assigns a category to every index, a functor ``H(f)``
to every index arrow and, for every composable pair ``(g, f)``, an
invertible comparison ``φ_{g,f}: H(g)∘H(f) => H(g∘f)``; unit cells
``u_k: id => H(id_k)`` complete the data.  The grid duck-types the parts of
:class:`~wgcat.simplex.Grid` used by the Segal-map machinery (``face``,
``degen``, ``directional``, item access), so Segal maps of a pseudo-functor
with discrete corners are computed by the same code as for strict grids.
"""

import itertools
from dataclasses import dataclass, field

from .errors import CheckFailure, PreconditionError, SizeCapExceeded
from .fincat import (
    DEFAULT_MAX_ARROWS,
    discrete_functor,
    p_isoclasses,
    p_map,
    validate_fincat,
    validate_functor,
)
from .simplex import (
    DEFAULT_M,
    Grid,
    IndexArrow,
    IndexCat,
    check_truncation,
    codegeneracy,
    coface,
    compose_index,
    corner,
    directional_arrow,
    identity_index_arrow,
    nu,
    segal_map,
    validate_grid,
)

DEFAULT_MAX_PAIRS = 200_000
DEFAULT_MAX_TRIPLES = 2_000_000


class PseudoGrid:
    """Pseudo-functor data over ``IndexCat(dim, m)``.

    ``entry(k)`` gives the category at ``k``; ``fmap(f)`` the functor for an
    :class:`IndexArrow` ``f``; ``phi(g, f, x)`` the component at ``x`` of
    ``φ_{g,f}`` (an arrow of ``H(g.tgt)`` from ``H(g)(H(f) x)`` to
    ``H(g∘f) x``); ``unit(k, x)`` the arrow ``x -> H(id_k) x``.  ``phi`` and
    ``unit`` default to identities, which is right for strict functors.
    Everything is cached.
    """

    def __init__(self, dim, m, entry, fmap, phi=None, unit=None, name=None):
        check_truncation(m)
        self.dim, self.m, self.name = dim, m, name
        self._entry, self._fmap, self._phi, self._unit = entry, fmap, phi, unit
        self._cache = {}
        self.index = IndexCat(dim, m)

    def _cached(self, key, make):
        try:
            return self._cache[key]
        except KeyError:
            v = self._cache[key] = make()
            return v

    def indices(self):
        return itertools.product(range(self.m + 1), repeat=self.dim)

    def __getitem__(self, k):
        k = tuple(k)
        return self._cached(("e", k), lambda: self._entry(k))

    def map(self, f):
        return self._cached(("m", f), lambda: self._fmap(f))

    def phi(self, g, f, x):
        if self._phi is None:
            return self[g.tgt].identity(self.map(g).ob(self.map(f).ob(x)))
        return self._cached(("phi", g, f, x), lambda: self._phi(g, f, x))

    def unit(self, k, x):
        k = tuple(k)
        if self._unit is None:
            return self[k].identity(x)
        return self._cached(("u", k, x), lambda: self._unit(k, x))

    def compose_index(self, g, f):
        return self._cached(("c", g, f), lambda: compose_index(g, f))

    # Grid-compatible accessors ------------------------------------------------

    def face(self, k, i, j):
        k = tuple(k)
        return self.map(directional_arrow(k, i, coface(k[i - 1], j), k[i - 1] - 1))

    def degen(self, k, i, j):
        k = tuple(k)
        return self.map(directional_arrow(k, i, codegeneracy(k[i - 1], j), k[i - 1] + 1))

    def directional(self, k, i, values, r):
        return self.map(directional_arrow(k, i, values, r))

    def __repr__(self):
        return f"<PseudoGrid {self.name or ''} dim={self.dim} m={self.m}>"


def from_grid(x, name=None):
    """A strict grid viewed as a pseudo-functor with identity coherence cells."""
    return PseudoGrid(x.dim, x.m, lambda k: x[k], x.map, name=name or x.name)


def restrict_to(h, dim, m, entry_index, arrow_index, name=None):
    """Pull ``h`` back along an index embedding (used for level restriction)."""

    def fmap(f):
        return h.map(arrow_index(f))

    def phi(g, f, x):
        return h.phi(arrow_index(g), arrow_index(f), x)

    def unit(k, x):
        return h.unit(entry_index(k), x)

    return PseudoGrid(dim, m, lambda k: h[entry_index(k)], fmap, phi, unit, name=name)


# --- coherence -----------------------------------------------------------------


def count_pairs(index):
    """Number of composable pairs of index arrows."""
    objs = index.objects
    return sum(
        index.hom_size(a, b) * index.hom_size(b, c) for a in objs for b in objs for c in objs
    )


def count_triples(index):
    """Number of composable triples of index arrows."""
    objs = index.objects
    total = 0
    for a in objs:
        for b in objs:
            hab = index.hom_size(a, b)
            if not hab:
                continue
            for c in objs:
                hbc = index.hom_size(b, c)
                if hbc:
                    total += hab * hbc * sum(index.hom_size(c, d) for d in objs)
    return total


def _check_cell(cat, arrow, s, t, where, tag):
    if cat.src(arrow) != s or cat.tgt(arrow) != t:
        raise CheckFailure(tag, where, "component has the wrong endpoints")
    if not cat.is_iso(arrow):
        raise CheckFailure(tag, where, "component is not invertible")


def _check_entries(h, max_arrows):
    for k in h.indices():
        try:
            validate_fincat(h[k], max_arrows=max_arrows)
        except CheckFailure as e:
            raise CheckFailure("entry", k, f"{e.condition} at {e.where!r}") from e


def _check_functors(h, max_arrows):
    for f in h.index.arrows:
        hf = h.map(f)
        if hf.dom is not h[f.src] or hf.cod is not h[f.tgt]:
            raise CheckFailure("functor endpoints", f)
        try:
            validate_functor(hf, max_arrows=max_arrows)
        except CheckFailure as e:
            raise CheckFailure("functor", f, f"{e.condition} at {e.where!r}") from e


def _check_phi(h):
    """Check every φ cell; return whether all of them are identities."""
    trivial = True
    for g, f in h.index.composable_pairs():
        gf = h.compose_index(g, f)
        hf, hg, hgf = h.map(f), h.map(g), h.map(gf)
        cat = h[g.tgt]
        for x in h[f.src].objects:
            c = h.phi(g, f, x)
            _check_cell(cat, c, hg.ob(hf.ob(x)), hgf.ob(x), (g, f, x), "coherence:phi")
            trivial = trivial and c == cat.identity(hgf.ob(x))
        dom = h[f.src]
        for a in dom.arrows:
            x, y = dom.src(a), dom.tgt(a)
            lhs = cat.compose(h.phi(g, f, y), hg.ar(hf.ar(a)))
            rhs = cat.compose(hgf.ar(a), h.phi(g, f, x))
            if lhs != rhs:
                raise CheckFailure("coherence:phi", (g, f, a), "not natural")
    return trivial


def _check_units(h):
    """Check unit cells and both triangles; return whether all unit cells are identities."""
    trivial = True
    for k in h.indices():
        ident = h.map(identity_index_arrow(k))
        cat = h[k]
        for x in cat.objects:
            u = h.unit(k, x)
            _check_cell(cat, u, x, ident.ob(x), (k, x), "coherence:unit")
            trivial = trivial and u == cat.identity(x)
        for a in cat.arrows:
            x, y = cat.src(a), cat.tgt(a)
            if cat.compose(h.unit(k, y), a) != cat.compose(ident.ar(a), h.unit(k, x)):
                raise CheckFailure("coherence:unit", (k, a), "not natural")
    for f in h.index.arrows:
        hf = h.map(f)
        cat = h[f.tgt]
        ids, idt = identity_index_arrow(f.src), identity_index_arrow(f.tgt)
        for x in h[f.src].objects:
            fx = hf.ob(x)
            right = cat.compose(h.phi(f, ids, x), hf.ar(h.unit(f.src, x)))
            if right != cat.identity(fx):
                raise CheckFailure("coherence:unit-right", (f, x))
            left = cat.compose(h.phi(idt, f, x), h.unit(f.tgt, fx))
            if left != cat.identity(fx):
                raise CheckFailure("coherence:unit-left", (f, x))
    return trivial


def _check_cocycle(h):
    index = h.index
    tables, composites = {}, {}

    def cells(g, f):
        # all components of φ_{g,f}, tabulated once per pair
        key = (g, f)
        if key not in tables:
            tables[key] = {x: h.phi(g, f, x) for x in h[f.src].objects}
        return tables[key]

    def comp(g, f):
        key = (g, f)
        if key not in composites:
            composites[key] = h.compose_index(g, f)
        return composites[key]

    for f in index.arrows:
        hf = h.map(f)
        objs = h[f.src].objects
        images = [hf.ob(x) for x in objs]
        for g in index.arrows_out_of(f.tgt):
            gf = comp(g, f)
            inner = cells(g, f)
            for k in index.arrows_out_of(g.tgt):
                kg = comp(k, g)
                hk_ar = h.map(k).ar
                compose = h[k.tgt].compose
                outer, left, right = cells(k, gf), cells(kg, f), cells(k, g)
                for x, y in zip(objs, images):
                    if compose(outer[x], hk_ar(inner[x])) != compose(left[x], right[y]):
                        raise CheckFailure("coherence:cocycle", (k, g, f, x))


def validate_pseudo(
    h, max_arrows=DEFAULT_MAX_ARROWS, max_pairs=DEFAULT_MAX_PAIRS, max_triples=DEFAULT_MAX_TRIPLES
):
    """Exhaustively check a :class:`PseudoGrid`; return ``h`` or raise.

    Checks every entry and functor, every ``φ`` and unit cell (endpoints,
    invertibility, naturality), both unit triangles for every arrow and the
    cocycle identity for every composable triple.  Failures name the pair or
    triple of index arrows and the component object.  When every cell turns
    out to be an identity the cocycle identity follows from functoriality,
    so the triple check is skipped.  More than ``max_pairs`` composable
    pairs, or ``max_triples`` triples when cells are given, raises
    ``SizeCapExceeded`` before any work.
    """
    n = count_pairs(h.index)
    if n > max_pairs:
        raise SizeCapExceeded(f"{n} composable pairs exceed cap {max_pairs}")
    if h._phi is not None or h._unit is not None:
        n = count_triples(h.index)
        if n > max_triples:
            raise SizeCapExceeded(f"{n} composable triples exceed cap {max_triples}")
    _check_entries(h, max_arrows)
    _check_functors(h, max_arrows)
    trivial = _check_phi(h)
    trivial = _check_units(h) and trivial
    if not trivial:
        _check_cocycle(h)
    return h


# --- Segal maps ------------------------------------------------------------------


def _require_discrete_corner(h, at, i):
    c = corner(at, 0, i)
    if not h[c].is_discrete():
        raise PreconditionError(
            f"entry {c!r} is not discrete, so the Segal cone at {at!r} in direction {i} "
            "only commutes up to isomorphism (discreteness condition (a))"
        )
    return c


def segal_maps_pseudo(h, at, i):
    """The Segal map of ``h`` at ``at`` in direction ``i``.

    Only defined when the corner ``h[at(0, i)]`` is discrete; then the cone
    of ``H(ν_j)`` commutes on the nose (checked here) and the map into the
    iterated pullback is unique.  Returns a :class:`~wgcat.simplex.SegalMap`.
    """
    at = tuple(at)
    if at[i - 1] < 2:
        raise PreconditionError("Segal maps start at level 2")
    _require_discrete_corner(h, at, i)
    k = at[i - 1]
    one = corner(at, 1, i)
    d0, d1 = h.face(one, i, 0), h.face(one, i, 1)
    legs = [h.directional(at, i, nu(k, j), 1) for j in range(1, k + 1)]
    for j in range(k - 1):
        a, b = legs[j], legs[j + 1]
        for x in h[at].objects:
            if d0.ob(a.ob(x)) != d1.ob(b.ob(x)):
                raise CheckFailure("segal cone", (at, i, j + 1), f"object {x!r}")
        for e in h[at].arrows:
            if d0.ar(a.ar(e)) != d1.ar(b.ar(e)):
                raise CheckFailure("segal cone", (at, i, j + 1), f"arrow {e!r}")
    return segal_map(h, at, i)


# --- iso-class collapse ----------------------------------------------------------


def bar_p(h, verify=True):
    """Apply ``p`` entrywise: a grid of sets (discrete categories).

    The structure maps are ``p(H(f))`` on generators.  With ``verify`` the
    result is checked to be strictly functorial: ``p(H(f))`` equals the
    composite of generators for every index arrow, and the generators satisfy
    the simplicial identities.
    """
    quots = {}

    def qt(k):
        if k not in quots:
            quots[k] = p_isoclasses(h[k])
        return quots[k]

    def entry(k):
        return qt(k).discrete()

    def induced(f):
        return discrete_functor(y[f.src], y[f.tgt], p_map(h.map(f), qt(f.src), qt(f.tgt)))

    def face(k, i, j):
        return induced(directional_arrow(k, i, coface(k[i - 1], j), k[i - 1] - 1))

    def degen(k, i, j):
        return induced(directional_arrow(k, i, codegeneracy(k[i - 1], j), k[i - 1] + 1))

    y = Grid(h.dim, h.m, entry, face, degen, name=f"p({h.name or 'H'})")
    if verify:
        check_strict_collapse(h, y, induced)
    return y


def check_strict_collapse(h, y, induced):
    """``p(H(f)) = y.map(f)`` for every index arrow ``f``; raise ``CheckFailure`` otherwise."""
    validate_grid(y)
    for f in h.index.arrows:
        direct, composite = induced(f), y.map(f)
        for x in y[f.src].objects:
            if direct.ob(x) != composite.ob(x):
                raise CheckFailure("p not strict", (f, x))
    return y


# --- Segalic pseudo-functors -------------------------------------------------------


@dataclass
class SegalicCert:
    """Evidence that a pseudo-functor is Segalic.

    ``discrete`` lists the corner indices found discrete, ``segal`` maps
    ``(index, direction)`` to the Segal map (all isomorphisms), ``p_grid`` is
    ``\\bar p H`` and ``truncation`` the weakly globular ``(n-1)``-fold
    category it is the multinerve of, with its certificate ``wg``.
    """

    n: int
    discrete: tuple = ()
    segal: dict = field(default_factory=dict, repr=False)
    p_grid: object = field(default=None, repr=False)
    truncation: object = field(default=None, repr=False)
    wg: object = field(default=None, repr=False)

    def to_json(self):
        return {
            "n": self.n,
            "discrete_corners": [list(k) for k in self.discrete],
            "segal_isos": [[list(k), i] for (k, i) in self.segal],
            "truncation": self.wg.to_json() if self.wg is not None else None,
        }


def _corners(h):
    return sorted({corner(k, 0, i) for k in h.indices() for i in range(1, h.dim + 1)})


def truncation_of(h, p_grid=None):
    """``π H``: the ``(n-1)``-fold category whose multinerve is ``\\bar p H``.

    Raises ``CheckFailure("segalic:c", ...)`` if ``\\bar p H`` is not a
    multinerve.
    """
    from .nfold import from_multinerve
    from .simplex import multinerve_failure

    s = bar_p(h) if p_grid is None else p_grid
    bad = multinerve_failure(s)
    if bad is not None:
        raise CheckFailure("segalic:c", bad, "isomorphism classes are not a multinerve")
    try:
        return from_multinerve(s)
    except CheckFailure as e:
        raise CheckFailure("segalic:c", e.where, e.detail) from e


def check_segalic(h):
    """Return a :class:`SegalicCert` or raise ``CheckFailure`` tagged ``segalic:a|b|c``.

    Assumes :func:`validate_pseudo` has passed.
    """
    from .wg import check_wg

    corners = _corners(h)
    for c in corners:
        if not h[c].is_discrete():
            raise CheckFailure("segalic:a", c, "corner entry is not discrete")
    segal = {}
    for i in range(1, h.dim + 1):
        for at in h.indices():
            if at[i - 1] >= 2:
                try:
                    sm = segal_maps_pseudo(h, at, i)
                except CheckFailure as e:
                    raise CheckFailure("segalic:b", (at, i), e.condition) from e
                if not sm.iso:
                    raise CheckFailure("segalic:b", (at, i), "Segal map is not an isomorphism")
                segal[at, i] = sm
    try:
        s = bar_p(h)
    except CheckFailure as e:
        raise CheckFailure("segalic:c", e.where, f"{e.condition}: {e.detail}") from e
    trunc = truncation_of(h, s)
    try:
        wg = check_wg(trunc)
    except CheckFailure as e:
        raise CheckFailure("segalic:c", e.where, f"{e.condition}: {e.detail}") from e
    return SegalicCert(h.dim + 1, tuple(corners), segal, s, trunc, wg)


def is_segalic(h):
    try:
        check_segalic(h)
    except CheckFailure:
        return False
    return True


def restrict_level(h, j):
    """``H_{j*}``: fix the first direction at level ``j``.

    Returns ``(restriction, cert)`` where ``cert`` certifies the restriction
    as Segalic.  Also checks that level ``j`` of ``π H`` equals ``π`` of the
    restriction, raising ``CheckFailure("level truncation", j)`` otherwise.
    """
    from .nfold import grids_equal

    if h.dim < 2:
        raise PreconditionError("level restriction needs at least two directions")
    if not 0 <= j <= h.m:
        raise PreconditionError(f"level {j} outside 0..{h.m}")
    first = tuple(range(j + 1))

    def ent(k):
        return (j,) + tuple(k)

    def arr(f):
        return IndexArrow(ent(f.src), ent(f.tgt), (first,) + tuple(f.maps))

    r = restrict_to(h, h.dim - 1, h.m, ent, arr, name=f"{h.name or 'H'}[{j}]")
    cert = check_segalic(r)
    whole = truncation_of(h)
    if not grids_equal(whole.fix(1, j), cert.truncation):
        raise CheckFailure("level truncation", j)
    return r, cert


# --- serialization -----------------------------------------------------------------


def pseudo_to_json(h, max_arrows=DEFAULT_MAX_ARROWS, max_pairs=DEFAULT_MAX_PAIRS):
    """Plain-JSON dict: every entry, the functor of every index arrow, every cell.

    A pseudo-functor is not determined by generators, so all index arrows
    and all composable pairs are listed; more than ``max_pairs`` pairs
    raises ``SizeCapExceeded``.
    """
    from .fincat import encode_id, fincat_to_json, functor_to_json, sort_key
    from .simplex import index_arrow_to_json

    n = count_pairs(h.index)
    if n > max_pairs:
        raise SizeCapExceeded(f"{n} composable pairs exceed cap {max_pairs}")
    out = {
        "kind": "pseudo",
        "name": h.name,
        "dim": h.dim,
        "m": h.m,
        "entries": [[list(k), fincat_to_json(h[k], max_arrows)] for k in h.indices()],
        "maps": [[index_arrow_to_json(f), functor_to_json(h.map(f))] for f in h.index.arrows],
        "coherence": [],
        "units": [],
    }
    if h._phi is not None:
        for g, f in h.index.composable_pairs():
            cells = [[encode_id(x), encode_id(h.phi(g, f, x))] for x in sorted(h[f.src].objects, key=sort_key)]
            out["coherence"].append([index_arrow_to_json(g), index_arrow_to_json(f), cells])
    if h._unit is not None:
        for k in h.indices():
            cells = [[encode_id(x), encode_id(h.unit(k, x))] for x in sorted(h[k].objects, key=sort_key)]
            out["units"].append([list(k), cells])
    return out


def pseudo_from_json(d):
    """Inverse of :func:`pseudo_to_json`; missing cells are identities."""
    from .errors import StructuralError
    from .fincat import decode_id, fincat_from_json, functor_from_json
    from .simplex import index_arrow_from_json

    try:
        dim, m = int(d["dim"]), int(d["m"])
        entries = {tuple(k): fincat_from_json(c) for k, c in d["entries"]}
        maps = {index_arrow_from_json(a): f for a, f in d["maps"]}
        phi = {
            (index_arrow_from_json(g), index_arrow_from_json(f), decode_id(x)): decode_id(c)
            for g, f, cells in d.get("coherence", [])
            for x, c in cells
        }
        unit = {(tuple(k), decode_id(x)): decode_id(c) for k, cells in d.get("units", []) for x, c in cells}
    except (KeyError, TypeError, ValueError) as e:
        raise StructuralError(f"malformed pseudo-functor record: {e}") from None
    for k in itertools.product(range(m + 1), repeat=dim):
        if k not in entries:
            raise StructuralError(f"missing entry {k!r}")

    def entry(k):
        return entries[k]

    def fmap(f):
        if f not in maps:
            raise StructuralError(f"missing functor for {f!r}")
        return functor_from_json(maps[f], entries[f.src], entries[f.tgt])

    def cell(table, key, cat, x):
        return table.get(key, cat.identity(x))

    h = PseudoGrid(
        dim,
        m,
        entry,
        fmap,
        (lambda g, f, x: cell(phi, (g, f, x), entries[g.tgt], h.map(g).ob(h.map(f).ob(x)))) if phi else None,
        (lambda k, x: cell(unit, (k, x), entries[k], x)) if unit else None,
        name=d.get("name"),
    )
    return h
