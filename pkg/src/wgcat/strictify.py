"""Strictification of Segalic pseudo-functors.

The free grid ``(TUH)_k = ∐_r I(r, k) × H_r`` carries the strict action
``α·(f, x) = (α∘f, x)`` and the structure map ``h_k(f, x) = H(f) x``.
Factoring each ``h_k`` as bijective-on-objects followed by fully faithful
gives categories ``L_k``; conjugating by the coherence cells makes ``L`` a
strict grid, and ``g: L -> H`` is the comparison.
"""

from dataclasses import dataclass, field

from .errors import CheckFailure, PreconditionError, SizeCapExceeded, TheoremViolation
from .fincat import (
    CoproductCat,
    Functor,
    bo_ff_factorize,
    check_equivalence,
    compose_functors,
    first_difference,
    is_isomorphism,
)
from .simplex import (
    Grid,
    codegeneracy,
    coface,
    corner,
    directional_arrow,
    identity_index_arrow,
    nu,
    segal_map,
    validate_grid,
)

DEFAULT_MAX_FREE_ARROWS = 20_000


def _face_arrow(k, i, j):
    return directional_arrow(k, i, coface(k[i - 1], j), k[i - 1] - 1)


def _degen_arrow(k, i, j):
    return directional_arrow(k, i, codegeneracy(k[i - 1], j), k[i - 1] + 1)


def _nu_arrow(k, i, j):
    return directional_arrow(k, i, nu(k[i - 1], j), 1)


class FreeGrid:
    """``TUH`` for a pseudo-functor ``h``, with injections and structure map.

    Objects of ``entry(k)`` are pairs ``(f, x)`` with ``f`` an index arrow
    ``r -> k`` and ``x`` an object of ``h[r]``; arrows are ``(f, a)``.
    Components are ordered by ``r`` and then by ``f``.
    """

    def __init__(self, h, max_arrows=DEFAULT_MAX_FREE_ARROWS):
        self.h, self.dim, self.m = h, h.dim, h.m
        index = h.index
        self.components = {
            k: tuple(f for r in index.objects for f in index.hom(r, k)) for k in index.objects
        }
        for k, comps in self.components.items():
            n = sum(len(h[f.src].arrows) for f in comps)
            if n > max_arrows:
                raise SizeCapExceeded(f"(TUH){k!r} has {n} arrows, cap is {max_arrows}")
        self._cache = {}
        self.grid = Grid(
            self.dim,
            self.m,
            self.entry,
            lambda k, i, j: self.action(_face_arrow(k, i, j)),
            lambda k, i, j: self.action(_degen_arrow(k, i, j)),
            name=f"TU{h.name or 'H'}",
        )

    def _cached(self, key, make):
        try:
            return self._cache[key]
        except KeyError:
            v = self._cache[key] = make()
            return v

    def entry(self, k):
        k = tuple(k)
        comps = self.components[k]
        return self._cached(
            ("e", k), lambda: CoproductCat([self.h[f.src] for f in comps], tags=comps, name=f"TUH{k}")
        )

    def __getitem__(self, k):
        return self.entry(k)

    def counts(self, k):
        c = self.entry(k)
        return len(c.objects), len(c.arrows)

    def injection(self, f):
        """``i_r j_f: H_r -> (TUH)_k`` for ``f: r -> k``."""
        return self.entry(f.tgt).injection(f)

    def structure(self, k):
        """``h_k``, materialized as lookup tables (the fold of the components)."""

        def make():
            c, h = self.entry(k), self.h
            ob = {(f, x): h.map(f).ob(x) for f, x in c.objects}
            ar = {(f, a): h.map(f).ar(a) for f, a in c.arrows}
            return Functor(c, h[k], ob, ar, name=f"h{k}")

        return self._cached(("h", tuple(k)), make)

    def action(self, alpha):
        """The strict action of an index arrow: ``(f, x) -> (alpha∘f, x)``."""

        def make():
            comp = self.h.compose_index
            return Functor(
                self.entry(alpha.src),
                self.entry(alpha.tgt),
                lambda z: (comp(alpha, z[0]), z[1]),
                lambda a: (comp(alpha, a[0]), a[1]),
                name="act",
            )

        return self._cached(("a", alpha), make)


def build_free(h, max_arrows=DEFAULT_MAX_FREE_ARROWS):
    """The free grid of ``h`` with verified structure map.

    Checks ``h_k ∘ i_r j_f = H(f)`` for every component and that the unit
    cells at the identity components are invertible.
    """
    free = FreeGrid(h, max_arrows)
    check_structure_map(free)
    return free


def check_structure_map(free):
    h = free.h
    for k, comps in free.components.items():
        hk = free.structure(k)
        for f in comps:
            d = first_difference(compose_functors(hk, free.injection(f)), h.map(f))
            if d is not None:
                raise CheckFailure("structure map", (k, f), f"differs on {d!r}")
        ident = identity_index_arrow(k)
        for x in h[k].objects:
            u = h.unit(k, x)
            cat = h[k]
            if cat.tgt(u) != hk.ob((ident, x)) or not cat.is_iso(u):
                raise CheckFailure("structure map unit", (k, x))
    return True


# --- the lemma on the free grid ----------------------------------------------------


def _discrete_corner(h, at, i):
    c = corner(at, 0, i)
    if not h[c].is_discrete():
        raise PreconditionError(f"corner {c!r} is not discrete (discreteness condition (a))")
    return c


def boundary_functors(free, at, i, j):
    """``∂_{ij}: (TUH)_{at(1,i)} -> (TUH)_{at(0,i)}``, the free action of ``δ_j``."""
    one = corner(at, 1, i)
    _discrete_corner(free.h, one, i)
    return free.action(_face_arrow(one, i, j))


def check_boundary_square(free, at, i, j):
    """``h_{at(0,i)} ∘ ∂_{ij} = d_{ij} ∘ h_{at(1,i)}`` on every object and arrow."""
    one, zero = corner(at, 1, i), corner(at, 0, i)
    lhs = compose_functors(free.structure(zero), boundary_functors(free, at, i, j))
    rhs = compose_functors(free.h.face(one, i, j), free.structure(one))
    d = first_difference(lhs, rhs)
    if d is not None:
        raise CheckFailure("boundary square", (one, i, j), f"differs on {d!r}")
    return True


@dataclass
class FreeSegal:
    """The Segal map of the free grid at ``at`` in direction ``i``."""

    at: tuple
    direction: int
    functor: Functor = field(repr=False)
    target: object = field(repr=False)
    hom_bijection: dict = field(repr=False, default_factory=dict)


def _hom_bijection(free, at, i):
    """Check ``I(r, at) ≅ I(r, at(1,i)) ×_{I(r, at(0,i))} ...`` by enumeration, per ``r``."""
    index, comp = free.h.index, free.h.compose_index
    k = at[i - 1]
    one = corner(at, 1, i)
    nus = [_nu_arrow(at, i, j) for j in range(1, k + 1)]
    d0, d1 = _face_arrow(one, i, 0), _face_arrow(one, i, 1)
    out = {}
    for r in index.objects:
        image = {f: tuple(comp(n, f) for n in nus) for f in index.hom(r, at)}
        if len(set(image.values())) != len(image):
            raise CheckFailure("free segal", (at, i, r), "index arrows not separated")
        edges = index.hom(r, one)
        tuples = [(e,) for e in edges]
        for _ in range(k - 1):
            tuples = [t + (e,) for t in tuples for e in edges if comp(d0, t[-1]) == comp(d1, e)]
        if set(tuples) != set(image.values()):
            raise CheckFailure("free segal", (at, i, r), "index arrows not a pullback")
        out[r] = len(image)
    return out


def free_segal_iso(free, at, i):
    """Verify the Segal map of ``TUH`` at ``at`` is an isomorphism; return :class:`FreeSegal`."""
    at = tuple(at)
    if at[i - 1] < 2:
        raise PreconditionError("Segal maps start at level 2")
    counts = _hom_bijection(free, at, i)
    sm = segal_map(free.grid, at, i)
    if not sm.iso:
        raise CheckFailure("free segal", (at, i), "Segal map is not an isomorphism")
    return FreeSegal(at, i, sm.functor, sm.target, counts)


def structure_map_decomposition(free, at, i):
    """Check ``μ_H ∘ h_at = (h_{at(1,i)}, ...) ∘ μ_TUH`` literally, on objects and arrows.

    Componentwise this is ``H(ν_j) H(f) = H(ν_j f)`` on every summand, so it
    holds exactly when the cells ``φ_{ν_j, f}`` are identities.  Returns the
    number of objects checked.
    """
    at = tuple(at)
    h = free.h
    k = at[i - 1]
    one = corner(at, 1, i)
    hk, h1 = free.structure(at), free.structure(one)
    c = free.entry(at)
    for j in range(1, k + 1):
        n = _nu_arrow(at, i, j)
        lhs = compose_functors(h.map(n), hk)
        rhs = compose_functors(h1, free.action(n))
        d = first_difference(lhs, rhs)
        if d is not None:
            raise CheckFailure("decomposition", (at, i, j), f"differs on {d!r}")
    return len(c.objects)


def verify_free_lemma(free):
    """Run every free-grid check over all indices and directions; return a summary dict."""
    h = free.h
    summary = {"structure": check_structure_map(free), "squares": 0, "segal": 0, "decomposition": 0}
    for i in range(1, h.dim + 1):
        for at in h.indices():
            if at[i - 1] == 1:
                for j in (0, 1):
                    check_boundary_square(free, at, i, j)
                    summary["squares"] += 1
            if at[i - 1] >= 2:
                free_segal_iso(free, at, i)
                structure_map_decomposition(free, at, i)
                summary["segal"] += 1
                summary["decomposition"] += 1
    return summary


# --- the strict grid L ---------------------------------------------------------------


DEFAULT_MAX_L_ARROWS = 60_000


def l_arrow_counts(free):
    """``|ar L_k|`` for every ``k``, computed from fibres of ``h_k`` without building ``L``."""
    out = {}
    for k in free.components:
        h = free.structure(k)
        fib = {}
        for o in h.dom.objects:
            y = h.ob(o)
            fib[y] = fib.get(y, 0) + 1
        cod = h.cod
        out[k] = sum(fib.get(cod.src(a), 0) * fib.get(cod.tgt(a), 0) for a in cod.arrows)
    return out


def check_l_size(free, max_l_arrows=DEFAULT_MAX_L_ARROWS):
    """Raise ``SizeCapExceeded`` if some ``L_k`` would have more than ``max_l_arrows`` arrows."""
    counts = l_arrow_counts(free)
    for k, n in counts.items():
        if n > max_l_arrows:
            raise SizeCapExceeded(f"L{k!r} would have {n} arrows, cap is {max_l_arrows}")
    return counts


class _Strict:
    """Levelwise factorizations ``h_k = g_k v_k`` and the conjugated action on ``L``."""

    def __init__(self, free):
        self.free, self.h = free, free.h
        self.v, self.g, self._action, self._inv = {}, {}, {}, {}
        for k in free.components:
            self.v[k], self.g[k] = bo_ff_factorize(free.structure(k))
        self.grid = Grid(
            free.dim,
            free.m,
            lambda k: self.v[k].cod,
            lambda k, i, j: self.action(_face_arrow(k, i, j)),
            lambda k, i, j: self.action(_degen_arrow(k, i, j)),
            name=f"L({self.h.name or 'H'})",
        )

    def _inverse(self, k, a):
        key = (k, a)
        if key not in self._inv:
            self._inv[key] = self.h[k].inverse(a)
        return self._inv[key]

    def action(self, alpha):
        """``L(alpha)``: free action on objects, conjugation by ``φ_{alpha, -}`` on arrows."""
        if alpha in self._action:
            return self._action[alpha]
        h = self.h
        comp, ha, cat, t = h.compose_index, h.map(alpha), h[alpha.tgt], alpha.tgt
        src = self.v[alpha.src].cod
        moved = {z: (comp(alpha, z[0]), z[1]) for z in src.objects}
        # φ_{alpha, f}(x) and its inverse per object; None marks an identity cell
        post, pre = {}, {}
        for z in src.objects:
            c = h.phi(alpha, z[0], z[1])
            if c == cat.identity(cat.src(c)) and cat.src(c) == cat.tgt(c):
                post[z] = pre[z] = None
            else:
                post[z], pre[z] = c, self._inverse(t, c)
        harr, compose = ha.ar, cat.compose

        def ar(a):
            z, z2, b = a
            c = harr(b)
            if pre[z] is not None:
                c = compose(c, pre[z])
            if post[z2] is not None:
                c = compose(post[z2], c)
            return (moved[z], moved[z2], c)

        fn = self._action[alpha] = Functor(src, self.v[alpha.tgt].cod, moved, ar, name="L")
        return fn


@dataclass
class StrictificationResult:
    """``L`` with ``v``, ``g``, the strict action and every verified certificate."""

    L: Grid
    v: dict = field(repr=False)
    g: dict = field(repr=False)
    action: object = field(repr=False)
    free: FreeGrid = field(repr=False)
    lemma: dict = field(default_factory=dict)
    nfold: object = field(default=None, repr=False)
    wg: object = field(default=None, repr=False)
    equivalences: dict = field(default_factory=dict, repr=False)
    g_iso: dict = field(default_factory=dict)

    def sizes(self):
        return {k: (len(c.objects), len(c.arrows)) for k, c in ((k, self.L[k]) for k in self.v)}


def _violation(statement, h, fn, *args):
    try:
        return fn(*args)
    except CheckFailure as e:
        raise TheoremViolation(statement, counterexample=h, cause=e) from e


def _check_factorization(st):
    for k, v in st.v.items():
        h, g = st.free.structure(k), st.g[k]
        if len({v.ob(x) for x in v.dom.objects}) != len(v.cod.objects):
            raise CheckFailure("bo", k)
        d = first_difference(compose_functors(g, v), h)
        if d is not None:
            raise CheckFailure("g v = h", k, repr(d))
    return True


def _check_ladder(st):
    free, L = st.free, st.grid
    for i in range(1, free.dim + 1):
        for at in free.h.indices():
            if at[i - 1] != 1:
                continue
            zero = corner(at, 0, i)
            for j in (0, 1):
                dt = L.face(at, i, j)
                top = first_difference(
                    compose_functors(st.v[zero], boundary_functors(free, at, i, j)),
                    compose_functors(dt, st.v[at]),
                )
                bottom = first_difference(
                    compose_functors(st.g[zero], dt),
                    compose_functors(free.h.face(at, i, j), st.g[at]),
                )
                if top is not None or bottom is not None:
                    raise CheckFailure("ladder", (at, i, j), repr(top or bottom))
    return True


def _check_action(st):
    """``L(alpha)`` equals the composite of generators for every index arrow."""
    L = st.grid
    validate_grid(L, check_entries=False)
    for alpha in st.h.index.arrows:
        d = first_difference(st.action(alpha), L.map(alpha))
        if d is not None:
            raise CheckFailure("strict action", alpha, repr(d))
    return True


def _check_segal(st):
    L = st.grid
    for i in range(1, L.dim + 1):
        for at in L.indices():
            if at[i - 1] >= 2 and not segal_map(L, at, i).iso:
                raise CheckFailure("segal", (at, i), "Segal map of L is not an isomorphism")
    return True


def _check_generators(st):
    """Endpoints and identities of every generator of ``L``.

    Composites are preserved because each generator conjugates a functor of
    ``H`` by invertible cells whose endpoints are checked here.
    """
    L = st.grid
    for kind, k, i, j, f in L.generators():
        dom, cod = f.dom, f.cod
        for x in dom.objects:
            if f.ar(dom.identity(x)) != cod.identity(f.ob(x)):
                raise CheckFailure("functor identities", (kind, k, i, j, x))
        for a in dom.arrows:
            b = f.ar(a)
            if cod.src(b) != f.ob(dom.src(a)) or cod.tgt(b) != f.ob(dom.tgt(a)):
                raise CheckFailure("functor endpoints", (kind, k, i, j, a))
            base = cod.base
            if base.src(b[2]) != cod.over(b[0]) or base.tgt(b[2]) != cod.over(b[1]):
                raise CheckFailure("functor endpoints", (kind, k, i, j, a))
    return True


def _validate_l(st):
    from .nfold import validate_nfold

    _check_generators(st)
    return validate_nfold(st.grid, check_entries=False)


def strictify(h, max_arrows=DEFAULT_MAX_FREE_ARROWS, lemma=True, max_l_arrows=DEFAULT_MAX_L_ARROWS):
    """Strictify a Segalic pseudo-functor and verify the result.

    Post-conditions, each checked exhaustively: (1) ``g_k v_k = h_k`` with
    ``v_k`` bijective on objects; (2) the boundary ladder commutes; (3) the
    Segal maps of ``L`` are isomorphisms; (4) the conjugated action is the
    composite of generators for every index arrow and satisfies the
    simplicial identities; (5) ``L`` is an n-fold category; (6) ``L`` is
    weakly globular; (7) every ``g_k`` is an equivalence.  Any failure
    raises :class:`TheoremViolation` with ``h`` as the counterexample.
    With ``lemma`` the free-grid checks run first.  Both the free grid and
    ``L`` are size-capped before anything large is built.
    """
    from .wg import check_wg

    free = FreeGrid(h, max_arrows)
    check_l_size(free, max_l_arrows)
    summary = verify_free_lemma(free) if lemma else {}
    st = _Strict(free)
    name = "strictification"
    _violation(f"{name}: factorization", h, _check_factorization, st)
    _violation(f"{name}: boundary ladder", h, _check_ladder, st)
    _violation(f"{name}: Segal maps of L", h, _check_segal, st)
    _violation(f"{name}: strict action", h, _check_action, st)
    nf = _violation(f"{name}: L is an n-fold category", h, _validate_l, st)
    wg = _violation(f"{name}: L is weakly globular", h, check_wg, st.grid)
    eqs = {k: _violation(f"{name}: g is an equivalence", h, check_equivalence, g) for k, g in st.g.items()}
    return StrictificationResult(
        L=st.grid,
        v=st.v,
        g=st.g,
        action=st.action,
        free=free,
        lemma=summary,
        nfold=nf,
        wg=wg,
        equivalences=eqs,
        g_iso={k: is_isomorphism(g) for k, g in st.g.items()},
    )


def verify_hd_variant(h, max_arrows=DEFAULT_MAX_FREE_ARROWS, max_l_arrows=DEFAULT_MAX_L_ARROWS):
    """Strictify ``h`` whose entries are equivalence relations and whose truncation is HD; check ``L`` is HD.

    Returns ``(result, HDCert)``.  Unmet hypotheses raise ``HypothesisFailure``.
    """
    from .errors import HypothesisFailure
    from .fincat import is_equivalence_relation_cat
    from .pseudo import truncation_of
    from .wg import check_hd

    for k in h.indices():
        if not is_equivalence_relation_cat(h[k]):
            raise HypothesisFailure("entry not an equivalence relation", k)
    try:
        check_hd(truncation_of(h))
    except CheckFailure as e:
        raise HypothesisFailure("truncation not homotopically discrete", e.where, e.detail) from e
    res = strictify(h, max_arrows=max_arrows, max_l_arrows=max_l_arrows)
    hd = _violation("strictification: L is homotopically discrete", h, check_hd, res.L)
    return res, hd
