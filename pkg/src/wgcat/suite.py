"""The acceptance suite: ten seeded, exact checks over generated instances.

Each ``criterion_*`` function returns a :class:`CriterionResult`; a failing
instance is recorded in ``failures`` and never raises out of the function.
"""

import time
from dataclasses import dataclass, field

from .errors import CheckFailure, PreconditionError, SizeCapExceeded, TheoremViolation, WGCatError
from .fincat import (
    FinCat,
    p_isoclasses,
    pullback_over_discrete,
    q_components,
    same_category,
)
from .gen import (
    CAT_FLAVORS,
    CORRUPTIONS,
    GenSpec,
    gen_corrupted,
    gen_fincat,
    gen_hd,
    gen_hd_pseudo,
    gen_nequiv_to_hd,
    gen_segalic,
    gen_wg,
    random_cospan,
)

SUITE_SEED = 20240


@dataclass
class CriterionResult:
    number: int
    title: str
    instances: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return self.instances > 0 and not self.failures

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"criterion {self.number:2d} {verdict}: {self.title} ({self.instances} instances{extra})"

    def row(self):
        return {
            "criterion": self.number,
            "title": self.title,
            "verdict": "pass" if self.passed else "fail",
            "instances": self.instances,
            "failures": len(self.failures),
        }


def _run(result, label, fn, *args):
    """Run one instance check, recording any package error as a failure."""
    result.instances += 1
    try:
        ok = fn(*args)
    except WGCatError as e:
        result.failures.append(f"{label}: {type(e).__name__}: {e}")
        return False
    if ok is False:
        result.failures.append(f"{label}: property does not hold")
    return ok is not False


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# --- 1: nerves ---------------------------------------------------------------------


def category_of_internal(ic):
    """The category encoded by an internal category whose levels are discrete."""
    objects = ic.x0.objects
    arrows = {a: (ic.d1.ob(a), ic.d0.ob(a)) for a in ic.x1.objects}
    identities = {x: ic.unit.ob(x) for x in objects}
    return FinCat(objects, arrows, identities, lambda g, f: ic.comp.ob((f, g)))


def _nerve_round_trip(c):
    from .simplex import is_nerve, nerve

    ok, ic = is_nerve(nerve(c))
    return ok and same_category(category_of_internal(ic), c)


def _corrupted_not_nerve(x):
    from .simplex import is_nerve, validate_grid

    validate_grid(x)
    return not is_nerve(x)[0]


@_timed
def criterion_1(n_random=100, n_corrupt=50, seed=SUITE_SEED):
    """Nerves of random categories are recognized and reconstructed; corrupted ones are not."""
    res = CriterionResult(1, "nerve characterization")
    for s in range(n_random):
        flavor = CAT_FLAVORS[s % len(CAT_FLAVORS)]
        c = gen_fincat(GenSpec(seed + s, flavor="fincat"), flavor)
        _run(res, f"category seed {seed + s} ({flavor})", _nerve_round_trip, c)
    for s in range(n_corrupt):
        _, x = gen_corrupted(GenSpec(seed + s, flavor="corrupted", target="segal"))
        _run(res, f"corrupted nerve seed {seed + s}", _corrupted_not_nerve, x)
    return res


# --- 2: q and p preserve pullbacks over discrete objects --------------------------


def _classes_match(f, g, collapse):
    """``collapse(A ×_D B)`` is in bijection with ``collapse(A) ×_D collapse(B)`` canonically."""
    p, pa, pb = pullback_over_discrete(f, g)
    qp, qa, qb = collapse(p), collapse(f.dom), collapse(g.dom)
    image = {}
    for x in p.objects:
        key = (qa(pa.ob(x)), qb(pb.ob(x)))
        if image.setdefault(qp(x), key) != key:
            return False
    if len(set(image.values())) != len(image):
        return False
    foot_a = {qa(a): f.ob(a) for a in f.dom.objects}
    foot_b = {qb(b): g.ob(b) for b in g.dom.objects}
    expected = {(a, b) for a, fa in foot_a.items() for b, gb in foot_b.items() if fa == gb}
    return set(image.values()) == expected


def _both_collapses_match(f, g):
    return _classes_match(f, g, q_components) and _classes_match(f, g, p_isoclasses)


@_timed
def criterion_2(n=100, seed=SUITE_SEED):
    """Components and iso classes of a pullback over a discrete foot are computed factorwise."""
    import random

    res = CriterionResult(2, "q and p preserve pullbacks over discrete objects")
    for s in range(n):
        f, g = random_cospan(random.Random(f"cospan:{seed + s}"))
        _run(res, f"cospan seed {seed + s}", _both_collapses_match, f, g)
    return res


# --- 3: direction swaps ------------------------------------------------------------


def _swap_round_trip(x):
    from .nfold import grids_equal, normalize, xi_swap, xi_unswap

    x = normalize(x)
    n = x.dim + 1
    return all(grids_equal(xi_unswap(xi_swap(x, k), k), x) for k in range(1, n + 1))


@_timed
def criterion_3(n=50, seed=SUITE_SEED):
    """Moving a direction to the front and back again is the identity, for every direction."""
    res = CriterionResult(3, "direction swap round trip")
    for s in range(n):
        dim = 2 if s % 5 else 3
        make = gen_wg if s % 2 else gen_hd
        x = make(GenSpec(seed + s, n=dim, flavor="wg-strict" if s % 2 else "hd"))
        _run(res, f"n={dim} seed {seed + s}", _swap_round_trip, x)
    return res


# --- 4, 5, 6: weakly globular and homotopically discrete instances ---------------


def _dims(count, share3):
    """Dimension schedule: every ``share3``-th instance has n = 3."""
    return [3 if share3 and s % share3 == share3 - 1 else 2 for s in range(count)]


@_timed
def criterion_4(n=30, seed=SUITE_SEED):
    """Every generated homotopically discrete instance is weakly globular."""
    from .wg import check_hd, check_wg

    res = CriterionResult(4, "homotopically discrete implies weakly globular")
    for s, dim in enumerate(_dims(n, 3)):
        x = gen_hd(GenSpec(seed + s, n=dim, flavor="hd"))
        _run(res, f"n={dim} seed {seed + s}", lambda x: bool(check_hd(x) and check_wg(x)), x)
    return res


@_timed
def criterion_5(n=30, seed=SUITE_SEED):
    """Instances meeting the level-0 criterion hypotheses are weakly globular; no theorem violation."""
    from .wg import criterion_wg

    res = CriterionResult(5, "level-0 criterion for weak globularity")
    for s, dim in enumerate(_dims(n, 6)):
        x = gen_wg(GenSpec(seed + s, n=dim, flavor="wg-strict"))
        _run(res, f"n={dim} seed {seed + s}", criterion_wg, x)
    return res


@_timed
def criterion_6(n=20, seed=SUITE_SEED):
    """The source of an n-equivalence to a homotopically discrete target is homotopically discrete."""
    from .wg import verify_nequiv_to_hd

    res = CriterionResult(6, "n-equivalence to homotopically discrete")
    for s, dim in enumerate(_dims(n, 4)):
        f = gen_nequiv_to_hd(GenSpec(seed + s, n=dim, flavor="hd"))
        _run(res, f"n={dim} seed {seed + s}", verify_nequiv_to_hd, f)
    return res


# --- 7, 8, 9: strictification -----------------------------------------------------


def _segalic(spec):
    from .pseudo import check_segalic, validate_pseudo

    h = gen_segalic(spec)
    if spec.n == 2:
        validate_pseudo(h)
    check_segalic(h)
    return h


def _free_lemma(spec):
    from .strictify import build_free, verify_free_lemma

    summary = verify_free_lemma(build_free(_segalic(spec)))
    return summary["structure"] and summary["squares"] > 0


@_timed
def criterion_7(n=20, seed=SUITE_SEED):
    """The free-grid identities hold exhaustively on generated Segalic pseudo-functors."""
    res = CriterionResult(7, "free grid: structure map, squares, Segal isos, decomposition")
    for s in range(n):
        spec = GenSpec(seed + s, n=2, flavor="segalic-transport")
        _run(res, f"n=2 seed {seed + s}", _free_lemma, spec)
    return res


def _strictifies(spec):
    from .strictify import strictify

    res = strictify(_segalic(spec))
    return all(c is not None for c in res.equivalences.values())


def strict_inputs(m=None):
    """Strict pseudo-functors at desk scale: cell grids with one object and small discrete nerves."""
    from .fincat import d_discrete
    from .gen import cell_grid
    from .pseudo import from_grid
    from .simplex import DEFAULT_M, nerve

    m = DEFAULT_M if m is None else m
    return [
        from_grid(cell_grid(1, 1, 1, m)),
        from_grid(cell_grid(1, 1, 2, m)),
        from_grid(nerve(d_discrete(range(2), name="D2"), m)),
    ]


def _strict_g_iso(h):
    from .strictify import strictify

    res = strictify(h)
    return all(res.g_iso.values())


@_timed
def criterion_8(n=20, seed=SUITE_SEED, strict=True):
    """Strictification of transported Segalic instances (n = 2, 3); strict inputs give isomorphisms."""
    res = CriterionResult(8, "strictification is weakly globular and levelwise equivalent")
    for s, dim in enumerate(_dims(n, 4)):
        spec = GenSpec(seed + s, n=dim, flavor="segalic-transport")
        _run(res, f"n={dim} seed {seed + s}", _strictifies, spec)
    if strict:
        for h in strict_inputs():
            _run(res, f"strict {h.name}: every g_k an isomorphism", _strict_g_iso, h)
    return res


def _hd_variant(spec):
    from .strictify import verify_hd_variant

    verify_hd_variant(gen_hd_pseudo(spec))
    return True


@_timed
def criterion_9(n=10, seed=SUITE_SEED):
    """Strictifying a pseudo-functor with equivalence-relation entries and discrete truncation gives HD."""
    res = CriterionResult(9, "homotopically discrete variant")
    for s in range(n):
        spec = GenSpec(seed + s, n=2, flavor="hd")
        _run(res, f"seed {seed + s}", _hd_variant, spec)
    return res


# --- 10: corruption -----------------------------------------------------------------


def _first_failure(steps):
    """Tag of the first failing step, or ``None`` when all pass."""
    for fn, arg in steps:
        try:
            fn(arg)
        except CheckFailure as e:
            return e.condition
    return None


def corruption_pipeline(target):
    """The checks run, in order, on an instance corrupted at ``target``, and the expected tag."""
    from .fincat import validate_fincat
    from .nfold import validate_nfold
    from .pseudo import check_segalic, validate_pseudo
    from .simplex import validate_grid

    return {
        "associativity": ([validate_fincat], "associativity"),
        "segal": ([validate_grid, validate_nfold], "segal"),
        "corner": ([validate_pseudo, check_segalic], "segalic:a"),
        "cocycle": ([validate_pseudo, check_segalic], "coherence:cocycle"),
    }[target]


def fails_exactly(target, base, bad):
    """The base passes the whole pipeline and the corrupted instance first fails at the target.

    For ``segal`` the base is a category and the pipeline runs on its nerve.
    """
    from .simplex import nerve

    checks, tag = corruption_pipeline(target)
    if target == "segal":
        base = nerve(base)
    if _first_failure([(c, base) for c in checks]) is not None:
        return False
    return _first_failure([(c, bad) for c in checks]) == tag


@_timed
def criterion_10(n=52, seed=SUITE_SEED):
    """Each corruption is detected at exactly its targeted condition."""
    res = CriterionResult(10, "negative suite")
    targets = sorted(CORRUPTIONS)
    for s in range(n):
        target = targets[s % len(targets)]
        base, bad = gen_corrupted(GenSpec(seed + s, flavor="corrupted", target=target))
        _run(res, f"{target} seed {seed + s}", fails_exactly, target, base, bad)
    return res


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_suite(numbers=None, echo=None):
    """Run the selected criteria (all by default); ``echo`` receives one line per criterion."""
    out = []
    for fn in CRITERIA:
        num = int(fn.__name__.rsplit("_", 1)[1])
        if numbers and num not in numbers:
            continue
        r = fn()
        out.append(r)
        if echo:
            echo(r.line())
    return out
