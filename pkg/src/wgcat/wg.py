"""Homotopically discrete and weakly globular n-fold categories, and n-equivalences.

All checkers take a grid in ``J_n`` form (an ``(n-1)``-grid of categories,
or an :class:`~wgcat.nfold.NFoldCat`) and either return a certificate or
raise :class:`~wgcat.errors.CheckFailure` with a ``where`` path locating
the failing sub-structure.  ``n`` is always ``grid.dim + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CheckFailure, HypothesisFailure, PreconditionError, TheoremViolation
from .fincat import (
    DiscreteCat,
    Functor,
    PullbackCat,
    check_equivalence,
    is_equivalence_relation_cat,
    p_isoclasses,
    restrict_functor,
)
from .nfold import as_grid, hom_fiber, xi_swap
from .simplex import (
    Grid,
    GridMap,
    apply_levelwise,
    constant_grid,
    corner,
    nu,
    segal_map,
)


def _within(label, fn, *args):
    """Run ``fn``; prefix the location of any :class:`CheckFailure` with ``label``."""
    try:
        return fn(*args)
    except CheckFailure as e:
        where = (label,) if e.where is None else (label, e.where)
        err = type(e)(e.condition, where, e.detail)
        raise err from e


def level(x, k):
    """``X_k``: the ``k``-th level in direction 1, an (n-1)-fold category."""
    return as_grid(x).fix(1, k)


def origin(x):
    return (0,) * x.dim


# --- truncation --------------------------------------------------------------


def p_truncate(x):
    """``p^(n)``: apply ``p`` entrywise and reassemble an (n-1)-fold category.

    Raises ``CheckFailure("truncation", ...)`` when the entrywise isomorphism
    classes fail the Segal condition in the last direction, so that no
    (n-1)-fold category has them as multinerve.
    """
    from .nfold import from_multinerve

    x = as_grid(x)
    if x.dim == 0:
        raise PreconditionError("p^(1) of a category is a set; use p_isoclasses")

    def make():
        s = apply_levelwise(x, "p")
        d = s.dim
        for at in s.indices():
            if at[d - 1] >= 2 and not segal_map(s, at, d).iso:
                raise CheckFailure("truncation", at, "isomorphism classes do not form a nerve")
        return from_multinerve(s)

    return x._cached(("p_truncate",), make)


def p_truncate_map(f, source=None, target=None):
    """``p^(n) f`` for a grid map ``f``."""
    source = source or p_truncate(f.source)
    target = target or p_truncate(f.target)
    d = source.dim

    def comp(s):
        f0, f1 = f[s + (0,)], f[s + (1,)]
        q0 = p_isoclasses(f.target[s + (0,)])
        q1 = p_isoclasses(f.target[s + (1,)])
        return Functor(source[s], target[s], lambda o: q0(f0.ob(o)), lambda a: q1(f1.ob(a)))

    return GridMap(source, target, comp, name="p(f)")


# --- homotopically discrete --------------------------------------------------


@dataclass
class HDCert:
    """Evidence that a grid is homotopically discrete.

    For ``n = 1`` only ``eqrel`` is set.  For ``n > 1``: ``levels`` holds a
    certificate per level in direction 1, ``segal`` the verified Segal
    isomorphisms, ``groupoidal`` that every entry is a groupoid and
    ``p_image`` the certificate of the truncation.
    """

    n: int
    eqrel: bool = False
    groupoidal: bool = False
    segal: list = field(default_factory=list, repr=False)
    levels: list = field(default_factory=list, repr=False)
    p_image: "HDCert" = field(default=None, repr=False)

    def to_json(self):
        return {
            "kind": "hd",
            "n": self.n,
            "eqrel": self.eqrel,
            "groupoidal": self.groupoidal,
            "segal": [list(k) for k in self.segal],
            "levels": [c.to_json() for c in self.levels],
            "p_image": self.p_image.to_json() if self.p_image else None,
        }


def _segal_dir1(x, tag):
    out = []
    for k in x.indices():
        if k[0] >= 2:
            if not segal_map(x, k, 1).iso:
                raise CheckFailure(tag, k, "Segal map is not an isomorphism")
            out.append(k)
    return out


def check_hd(x):
    """Return an :class:`HDCert` or raise ``CheckFailure`` (tags ``hd:...``)."""
    x = as_grid(x)
    return x._cached(("hd",), lambda: _check_hd(x))


def _check_hd(x):
    n = x.dim + 1
    if n == 1:
        if not is_equivalence_relation_cat(x[()]):
            raise CheckFailure("hd:equivalence relation", None, "category is not an equivalence relation")
        return HDCert(1, eqrel=True)
    for k in x.indices():
        if not x[k].is_groupoid():
            raise CheckFailure("hd:groupoidal", k, "entry has a non-invertible arrow")
    levels = [_within(f"level {r}", check_hd, level(x, r)) for r in range(x.m + 1)]
    segal = _segal_dir1(x, "hd:segal")
    y = _within("p", p_truncate, x)
    p_cert = _within("p", check_hd, y)
    return HDCert(n, groupoidal=True, segal=segal, levels=levels, p_image=p_cert)


def is_hd(x):
    try:
        check_hd(x)
    except CheckFailure:
        return False
    return True


# --- discretization ----------------------------------------------------------


@dataclass
class Discretization:
    """``X^d`` (the set ``points``, as a constant grid) and ``γ: X -> X^d``."""

    points: tuple
    gamma: GridMap
    target: Grid

    def point(self, k, o):
        """The point of ``X^d`` under the object ``o`` of entry ``k``."""
        return self.gamma[k].ob(o)


def _origin_classes(x):
    """Points of ``X^d`` and the map from objects of the origin entry to them."""
    if x.dim == 0:
        q = p_isoclasses(x[()])
        return q.elements, q
    y = p_truncate(x)
    points, g = _origin_classes(y)
    q = p_isoclasses(x[origin(x)])
    return points, lambda o: g(q(o))


def _to_origin(k):
    """Index arrow ``k -> 0`` picking vertex 0 in every direction."""
    from .simplex import IndexArrow

    return IndexArrow(tuple(k), (0,) * len(k), tuple((0,) for _ in k))


def discretize(x, cert=None):
    """Compute ``X^d`` and ``γ`` for a homotopically discrete grid; the grid map is verified."""
    x = as_grid(x)

    def make():
        if cert is None:
            check_hd(x)
        points, g0 = _origin_classes(x)
        target = constant_grid(DiscreteCat(points, name="X^d"), x.dim, x.m)

        def comp(k):
            to0 = x.map(_to_origin(k)) if x.dim else None

            def ob(o):
                return g0(to0.ob(o)) if to0 is not None else g0(o)

            return Functor(x[k], target[k], ob, lambda a: ("id", ob(x[k].src(a))))

        gamma = GridMap(x, target, comp, name="gamma")
        for k in x.indices():
            c, gk = x[k], gamma[k]
            for a in c.arrows:
                if gk.ob(c.src(a)) != gk.ob(c.tgt(a)):
                    raise CheckFailure("discretization", k, "an arrow joins distinct points")
        gamma.check_natural()
        return Discretization(tuple(points), gamma, target)

    return x._cached(("discretize",), make)


# --- n-equivalences ----------------------------------------------------------


@dataclass
class NEquivCert:
    """Evidence that a grid map is an n-equivalence.

    ``n = 1``: ``equivalence`` is an :class:`~wgcat.fincat.EquivCertificate`.
    ``n > 1``: ``fibers[(a, b)]`` certifies ``f(a, b)`` and ``p_image``
    certifies ``p^(n) f``.
    """

    n: int
    equivalence: object = field(default=None, repr=False)
    fibers: dict = field(default_factory=dict, repr=False)
    p_image: "NEquivCert" = None

    def verify(self):
        if self.n == 1:
            return self.equivalence.verify()
        for c in self.fibers.values():
            c.verify()
        return self.p_image.verify()

    def to_json(self):
        from .fincat import encode_id

        if self.n == 1:
            eq = self.equivalence
            return {
                "kind": "nequiv",
                "n": 1,
                "ff": [
                    [encode_id(x), encode_id(y), [[encode_id(a), encode_id(b)] for a, b in t.items()]]
                    for (x, y), t in eq.witness_ff.items()
                ],
                "eso": [[encode_id(z), encode_id(x), encode_id(i)] for z, (x, i) in eq.witness_eso.items()],
            }
        return {
            "kind": "nequiv",
            "n": self.n,
            "fibers": [[encode_id(a), encode_id(b), c.to_json()] for (a, b), c in self.fibers.items()],
            "p_image": self.p_image.to_json(),
        }


def fiber_map(f, a, b, dx, dy):
    """``f(a, b): X(a, b) -> Y(f a, f b)`` given discretizations of ``X_0`` and ``Y_0``."""
    x, y = f.source, f.target
    fa, fb = image_point(f, a, dx, dy), image_point(f, b, dx, dy)
    src = hom_fiber(x, a, b, dx.gamma)
    tgt = hom_fiber(y, fa, fb, dy.gamma)
    return GridMap(src, tgt, lambda s: restrict_functor(f[(1,) + s], src[s], tgt[s]), name=f"f({a},{b})")


def image_point(f, a, dx, dy):
    """The point ``f a`` of ``Y_0^d`` for a point ``a`` of ``X_0^d``."""
    x = f.source
    k0 = (0,) * x.dim
    for o in x[k0].objects:
        if dx.point(k0[1:], o) == a:
            return dy.point(k0[1:], f[k0].ob(o))
    raise PreconditionError(f"point {a!r} has no object over it")


def check_nequiv(f):
    """Return an :class:`NEquivCert` for a grid map or raise ``CheckFailure``."""
    n = f.source.dim + 1
    if n == 1:
        return NEquivCert(1, equivalence=check_equivalence(f[()]))
    dx = _within("source X_0", discretize, level(f.source, 0))
    dy = _within("target X_0", discretize, level(f.target, 0))
    fibers = {}
    for a in dx.points:
        for b in dx.points:
            fab = fiber_map(f, a, b, dx, dy)
            fibers[a, b] = _within(("fiber", a, b), check_nequiv, fab)
    pf = _within("p", p_truncate_map, f)
    return NEquivCert(n, fibers=fibers, p_image=_within("p", check_nequiv, pf))


def is_nequiv(f):
    try:
        check_nequiv(f)
    except CheckFailure:
        return False
    return True


# --- induced Segal maps as grid maps -----------------------------------------


def induced_segal_grid(x, k, d0=None):
    """The induced Segal map ``X_k -> X_1 ×_{X_0^d} ... ×_{X_0^d} X_1`` as a grid map."""
    x = as_grid(x)
    d0 = d0 or discretize(level(x, 0))
    x1 = level(x, 1)

    def legs(s):
        g = d0.gamma[s]
        right = _compose(g, x.face((1,) + s, 1, 0))
        left = _compose(g, x.face((1,) + s, 1, 1))
        return right, left

    def entry(s):
        right, left = legs(s)
        return PullbackCat([x1[s]] * k, [right] * (k - 1), [left] * (k - 1))

    def gen(kind):
        def make(s, i, j):
            f = x1.face(s, i, j) if kind == "d" else x1.degen(s, i, j)
            s2 = corner(s, s[i - 1] + (-1 if kind == "d" else 1), i)
            return Functor(
                p[s],
                p[s2],
                lambda t: tuple(f.ob(e) for e in t),
                lambda t: tuple(f.ar(e) for e in t),
            )

        return make

    p = Grid(x1.dim, x.m, entry, gen("d"), gen("s"), name=f"P{k}")
    xk = level(x, k)

    def comp(s):
        nus = [x.directional((k,) + s, 1, nu(k, j), 1) for j in range(1, k + 1)]
        return p[s].tuple_functor(xk[s], nus)

    return GridMap(xk, p, comp, name=f"mu^{k}")


def _compose(g, f):
    from .fincat import compose_functors

    return compose_functors(g, f)


# --- weakly globular ---------------------------------------------------------


@dataclass
class WGCert:
    """Evidence that a grid is weakly globular (see :func:`check_wg`)."""

    n: int
    levels: list = field(default_factory=list, repr=False)
    hd0: HDCert = field(default=None, repr=False)
    segal: list = field(default_factory=list, repr=False)
    induced: dict = field(default_factory=dict, repr=False)
    p_image: "WGCert" = None

    def to_json(self):
        return {
            "kind": "wg",
            "n": self.n,
            "levels": [c.to_json() for c in self.levels],
            "hd0": self.hd0.to_json() if self.hd0 else None,
            "segal": [list(k) for k in self.segal],
            "induced": {str(k): c.to_json() for k, c in self.induced.items()},
            "p_image": self.p_image.to_json() if self.p_image else None,
        }


def check_wg(x):
    """Return a :class:`WGCert` or raise ``CheckFailure``.

    Tags: ``wg:a`` (level 0 not homotopically discrete), ``wg:b`` (Segal),
    ``wg:c`` (induced Segal map not an (n-1)-equivalence), ``wg:d``
    (truncation not weakly globular), prefixed by the location.
    """
    x = as_grid(x)
    return x._cached(("wg",), lambda: _check_wg(x))


def _retag(tag, fn, *args):
    try:
        return fn(*args)
    except CheckFailure as e:
        raise CheckFailure(tag, e.where, f"{e.condition}: {e.detail}") from e


def _check_wg(x):
    n = x.dim + 1
    if n == 1:
        return WGCert(1)
    levels = [_within(f"level {r}", check_wg, level(x, r)) for r in range(x.m + 1)]
    hd0 = _retag("wg:a", check_hd, level(x, 0))
    segal = _segal_dir1(x, "wg:b")
    d0 = discretize(level(x, 0), hd0)
    induced = {}
    for k in range(2, x.m + 1):
        mu = induced_segal_grid(x, k, d0)
        induced[k] = _within(f"induced {k}", _retag, "wg:c", check_nequiv, mu)
    y = _retag("wg:d", p_truncate, x)
    p_cert = _within("p", _retag, "wg:d", check_wg, y)
    return WGCert(n, levels=levels, hd0=hd0, segal=segal, induced=induced, p_image=p_cert)


def is_wg(x):
    try:
        check_wg(x)
    except CheckFailure:
        return False
    return True


# --- verified statements -----------------------------------------------------


def _conclude(statement, fn, x, *args):
    """Run the conclusion check; a failure here contradicts a theorem."""
    try:
        return fn(x, *args)
    except CheckFailure as e:
        raise TheoremViolation(statement, counterexample=x, cause=e) from e


def _hypothesis(fn, *args):
    try:
        return fn(*args)
    except CheckFailure as e:
        raise HypothesisFailure(e.condition, e.where, e.detail) from e


def criterion_wg(x):
    """Weak globularity from the level-0 criterion, checked on one n-fold category.

    Hypotheses: ``X_0`` is homotopically discrete, each ``X_{s0}`` (level 0
    of ``X_s`` in the next direction) is homotopically discrete, and the
    entrywise isomorphism classes form a weakly globular (n-1)-fold
    category.  When they hold, ``check_wg`` must succeed; otherwise a
    :class:`TheoremViolation` is raised.  Unmet hypotheses raise
    :class:`HypothesisFailure`.
    """
    x = as_grid(x)
    n = x.dim + 1
    if n < 2:
        raise PreconditionError("the criterion concerns n >= 2")
    _hypothesis(check_hd, level(x, 0))
    if n >= 3:
        for s in range(x.m + 1):
            _hypothesis(check_hd, level(level(x, s), 0))
    _hypothesis(check_wg, _hypothesis(p_truncate, x))
    return _conclude("an n-fold category meeting the criterion is weakly globular", check_wg, x)


def verify_nequiv_to_hd(f):
    """An n-equivalence ``X -> Y`` from a weakly globular ``X`` to a homotopically discrete ``Y``
    forces ``X`` to be homotopically discrete."""
    _hypothesis(check_wg, f.source)
    _hypothesis(check_hd, f.target)
    _hypothesis(check_nequiv, f)
    return _conclude("weakly globular and n-equivalent to homotopically discrete", check_hd, f.source)


def verify_hd_criterion(x):
    """A weakly globular ``X`` with ``X_1`` and ``p^(n) X`` homotopically discrete is homotopically discrete."""
    x = as_grid(x)
    _hypothesis(check_wg, x)
    _hypothesis(check_hd, level(x, 1))
    _hypothesis(check_hd, _hypothesis(p_truncate, x))
    return _conclude("criterion for homotopical discreteness", check_hd, x)


def nerve_dir2_wg(x):
    """Each level of the nerve in direction 2 of a weakly globular ``X`` is weakly globular."""
    x = as_grid(x)
    _hypothesis(check_wg, x)
    z = xi_swap(x, 2)
    return [
        _conclude(f"level {r} of the direction-2 nerve is weakly globular", check_wg, level(z, r))
        for r in range(x.m + 1)
    ]


# --- runtime checks of the properties of homotopically discrete objects -------


def gamma_n(x):
    """``γ^(n): X -> d^(n) p^(n) X``, entrywise the quotient onto isomorphism classes."""
    x = as_grid(x)
    target = apply_levelwise(x, "p")

    def comp(k):
        q = p_isoclasses(x[k])
        return Functor(x[k], target[k], q, lambda a: ("id", q(x[k].src(a))))

    return GridMap(x, target, comp, name="gamma^(n)")


def check_gamma_levelwise_equivalence(x):
    """Each level ``γ^(n)_k`` (direction 1) is an (n-1)-equivalence; n = 1 gives an equivalence."""
    g = gamma_n(x)
    if x.dim == 0:
        return [check_equivalence(g[()])]
    certs = []
    for r in range(x.m + 1):
        src, tgt = level(x, r), level(g.target, r)
        certs.append(check_nequiv(GridMap(src, tgt, lambda s, r=r: g[(r,) + s])))
    return certs


def check_induced_segal_on_hd(x):
    """On a homotopically discrete ``X``, the induced Segal maps are (n-1)-equivalences."""
    x = as_grid(x)
    check_hd(x)
    d0 = discretize(level(x, 0))
    return {k: check_nequiv(induced_segal_grid(x, k, d0)) for k in range(2, x.m + 1)}


def discrete_sets_isomorphic(f):
    """Whether ``f`` induces a bijection ``X^d -> Y^d`` (both sides homotopically discrete)."""
    dx, dy = discretize(f.source), discretize(f.target)
    k0 = (0,) * f.source.dim
    image = {}
    for o in f.source[k0].objects:
        image[dx.point(k0, o)] = dy.point(k0, f[k0].ob(o))
    return len(set(image.values())) == len(dx.points) == len(dy.points)


def entries_are_equivalence_relations(x):
    x = as_grid(x)
    return all(is_equivalence_relation_cat(x[k]) for k in x.indices())


def check_discrete_segal_remark(x):
    """For weakly globular ``X`` (n >= 3): ``(X_{s0})^d`` is the iterated pullback of ``(X_{10})^d`` over ``(X_{00})^d``.

    Compares cardinalities of the discretized sets and checks that the map
    induced by the ``ν_j`` is a bijection onto the pullback.
    """
    x = as_grid(x)
    if x.dim < 2:
        raise PreconditionError("needs n >= 3")
    d = {s: discretize(level(level(x, s), 0)) for s in range(x.m + 1)}
    rest = (0,) * (x.dim - 2)
    for s in range(2, x.m + 1):
        at = (s, 0) + rest
        maps = [x.directional(at, 1, nu(s, j), 1) for j in range(1, s + 1)]
        tgt1, src1 = x.face((1, 0) + rest, 1, 0), x.face((1, 0) + rest, 1, 1)
        pts = {}
        for o in x[at].objects:
            pts.setdefault(d[s].point(rest, o), tuple(d[1].point(rest, f.ob(o)) for f in maps))
        # iterated pullback of the discretized sets
        ones = {}
        for o in x[(1, 0) + rest].objects:
            ones[d[1].point(rest, o)] = (
                d[0].point(rest, src1.ob(o)),
                d[0].point(rest, tgt1.ob(o)),
            )
        chains = [(p,) for p in ones]
        for _ in range(s - 1):
            chains = [c + (p,) for c in chains for p in ones if ones[c[-1]][1] == ones[p][0]]
        if len(set(pts.values())) != len(pts) or set(pts.values()) != set(chains):
            return False
    return True
