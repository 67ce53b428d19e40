"""Command-line driver: ``wgcat validate | check | strictify | gen | corpus``.

Instances are JSON files: an explicit record (a category, a grid, a grid map
or a pseudo-functor) or a generator spec, recognised by its ``seed`` and
``flavor`` keys, which is expanded deterministically.  Reports and
certificates go to stdout or to ``--out``; timings go to stderr only so
that reports are reproducible.

Exit codes: 0 pass, 1 property failure, 2 precondition or format error,
3 theorem violation, 4 input/output error.
"""

import csv
import io
import json
import sys
import time
from pathlib import Path

import click

from .errors import (
    CheckFailure,
    PreconditionError,
    SizeCapExceeded,
    StructuralError,
    TheoremViolation,
    WGCatError,
)

EXIT_PASS, EXIT_FAIL, EXIT_PRECONDITION, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3, 4

# L.json is skipped when L has more composable pairs than this, summed over entries
L_JSON_PAIRS = 1_000_000

KINDS = ("fincat", "grid", "pseudo", "map")
PROPERTIES = ("hd", "wg", "segalic", "nequiv")


class _Exit(Exception):
    def __init__(self, code, report):
        self.code, self.report = code, report


def _dumps(obj, compact=False):
    if compact:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False)


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise _Exit(EXIT_IO, {"verdict": "io-error", "detail": str(e)}) from None
    except json.JSONDecodeError as e:
        raise _Exit(EXIT_PRECONDITION, {"verdict": "format-error", "detail": str(e)}) from None


def _write(path, text):
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise _Exit(EXIT_IO, {"verdict": "io-error", "detail": str(e)}) from None


def _kind_of(d):
    if "seed" in d and "flavor" in d:
        return "spec"
    if "kind" in d:
        return d["kind"]
    if "objects" in d and "compose" in d:
        return "fincat"
    raise StructuralError("cannot tell what kind of record this is")


def load_instance(path, kind=None):
    """``(kind, object)`` read from a JSON file; generator specs are expanded."""
    from .fincat import fincat_from_json
    from .gen import GenSpec, generate
    from .pseudo import PseudoGrid, pseudo_from_json
    from .simplex import Grid, GridMap, grid_from_json, map_from_json

    d = _read_json(path)
    found = _kind_of(d)
    if found == "spec":
        obj = generate(GenSpec.from_json(d))
        found = (
            "pseudo" if isinstance(obj, PseudoGrid)
            else "grid" if isinstance(obj, Grid)
            else "map" if isinstance(obj, GridMap)
            else "fincat"
        )
    else:
        obj = {"fincat": fincat_from_json, "grid": grid_from_json, "pseudo": pseudo_from_json, "map": map_from_json}[
            found
        ](d)
    if kind and kind != found:
        raise PreconditionError(f"expected a {kind} record, found {found}")
    return found, obj


def _failure_report(e):
    if isinstance(e, TheoremViolation):
        return EXIT_VIOLATION, {"verdict": "theorem-violation", "statement": e.statement, "detail": str(e.cause)}
    if isinstance(e, CheckFailure):
        return EXIT_FAIL, {"verdict": "fail", "condition": e.condition, "where": repr(e.where), "detail": e.detail}
    if isinstance(e, (PreconditionError, StructuralError)):
        return EXIT_PRECONDITION, {"verdict": "precondition", "detail": str(e)}
    return EXIT_FAIL, {"verdict": "error", "detail": str(e)}


def _guard(operation, path, fn):
    """Run ``fn`` and turn its outcome into an exit code and a JSON report on stdout."""
    t0 = time.perf_counter()
    try:
        code, report = EXIT_PASS, {"verdict": "pass", **(fn() or {})}
    except _Exit as e:
        code, report = e.code, e.report
    except WGCatError as e:
        code, report = _failure_report(e)
    report = {"instance": str(path), "operation": operation, **report}
    click.echo(_dumps(report))
    click.echo(f"{operation}: {report['verdict']} in {time.perf_counter() - t0:.2f}s", err=True)
    sys.exit(code)


@click.group()
def main():
    """Check weakly globular n-fold categories and strictify Segalic pseudo-functors."""


@main.command()
@click.argument("path")
@click.option("--kind", type=click.Choice(KINDS), default=None, help="Expected record kind.")
@click.option("--max-arrows", type=int, default=None, help="Per-category size cap.")
def validate(path, kind, max_arrows):
    """Validate a category, grid, grid map or pseudo-functor."""
    from .fincat import DEFAULT_MAX_ARROWS, validate_fincat
    from .pseudo import validate_pseudo
    from .simplex import validate_grid

    cap = max_arrows or DEFAULT_MAX_ARROWS

    def run():
        found, obj = load_instance(path, kind)
        if found == "fincat":
            validate_fincat(obj, max_arrows=cap)
        elif found == "grid":
            validate_grid(obj, max_arrows=cap)
        elif found == "map":
            validate_grid(obj.source, max_arrows=cap)
            validate_grid(obj.target, max_arrows=cap)
            obj.check_natural()
        else:
            validate_pseudo(obj, max_arrows=cap)
        return {"kind": found}

    _guard(f"validate:{kind or 'auto'}", path, run)


def certificate(prop, obj):
    """The certificate of ``prop`` for ``obj`` as plain JSON."""
    from .pseudo import check_segalic
    from .wg import check_hd, check_nequiv, check_wg

    if prop == "hd":
        return check_hd(obj).to_json()
    if prop == "wg":
        return check_wg(obj).to_json()
    if prop == "segalic":
        return check_segalic(obj).to_json()
    return check_nequiv(obj).to_json()


@main.command()
@click.argument("path")
@click.option("--property", "prop", type=click.Choice(PROPERTIES), required=True)
@click.option("--out", type=click.Path(), default=None, help="Write the certificate here.")
@click.option("--recheck", type=click.Path(), default=None, help="Recompute and compare with a stored certificate.")
def check(path, prop, out, recheck):
    """Certify a property; with --recheck, re-verify a stored certificate."""
    expect = {"hd": "grid", "wg": "grid", "segalic": "pseudo", "nequiv": "map"}[prop]

    def run():
        _, obj = load_instance(path, expect)
        cert = certificate(prop, obj)
        if recheck:
            stored = _read_json(recheck)
            if stored != json.loads(json.dumps(cert)):
                raise _Exit(EXIT_FAIL, {"verdict": "fail", "condition": "certificate mismatch", "detail": str(recheck)})
            return {"property": prop, "rechecked": str(recheck)}
        if out:
            _write(out, _dumps(cert))
            return {"property": prop, "certificate": str(out)}
        return {"property": prop, "certificate": cert}

    _guard(f"check:{prop}", path, run)


def _pairs(x):
    return sum(sum(1 for _ in x[k].composable_pairs()) for k in x.indices())


def result_summary(res):
    """JSON-ready summary of a strictification result."""
    from .fincat import encode_id, sort_key

    return {
        "sizes": [[list(k), list(v)] for k, v in sorted(res.sizes().items())],
        "lemma": res.lemma,
        "g_iso": [[list(k), v] for k, v in sorted(res.g_iso.items())],
        "g_objects": [
            [list(k), [[encode_id(x), encode_id(g.ob(x))] for x in sorted(g.dom.objects, key=sort_key)]]
            for k, g in sorted(res.g.items())
        ],
    }


@main.command()
@click.argument("path")
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
@click.option("--dump-free", is_flag=True, help="Also write the free grid.")
@click.option("--max-arrows", type=int, default=None, help="Cap on arrows of each free-grid entry.")
def strictify(path, out, dump_free, max_arrows):
    """Strictify a Segalic pseudo-functor and certify the result."""
    from .pseudo import check_segalic, from_grid, pseudo_to_json
    from .simplex import grid_to_json, relabel
    from .strictify import DEFAULT_MAX_FREE_ARROWS
    from .strictify import strictify as run_strictify

    out = Path(out)

    def run():
        kind, h = load_instance(path)
        if kind == "grid":
            h = from_grid(h)
        elif kind != "pseudo":
            raise PreconditionError(f"expected a pseudo-functor or a grid, found {kind}")
        try:
            check_segalic(h)
        except CheckFailure as e:
            raise PreconditionError(f"input is not Segalic: {e}") from e
        try:
            res = run_strictify(h, max_arrows=max_arrows or DEFAULT_MAX_FREE_ARROWS)
        except TheoremViolation as e:
            dump = {"statement": e.statement, "cause": str(e.cause)}
            try:
                dump["input"] = pseudo_to_json(h)
            except WGCatError as why:
                dump["input"] = {"omitted": str(why)}
            _write(out / "counterexample.json", _dumps(dump))
            raise
        _write(out / "result.json", _dumps(result_summary(res)))
        _write(out / "wg_certificate.json", _dumps(res.wg.to_json(), compact=True))
        files = ["result.json", "wg_certificate.json"]
        if _pairs(res.L) <= L_JSON_PAIRS:
            grid, labels = relabel(res.L)
            record = grid_to_json(grid, max_arrows or L_JSON_PAIRS)
            record["object_labels"] = [[list(k), labels[k]] for k in grid.indices()]
            _write(out / "L.json", _dumps(record, compact=True))
            files.append("L.json")
        if dump_free:
            grid, labels = relabel(res.free.grid)
            record = grid_to_json(grid, max_arrows)
            record["object_labels"] = [[list(k), labels[k]] for k in grid.indices()]
            _write(out / "free.json", _dumps(record, compact=True))
            files.append("free.json")
        return {"files": files, "g_iso": all(res.g_iso.values())}

    _guard("strictify", path, run)


def instance_to_json(obj):
    from .fincat import Category, fincat_to_json
    from .pseudo import PseudoGrid, pseudo_to_json
    from .simplex import Grid, GridMap, grid_to_json, map_to_json

    if isinstance(obj, PseudoGrid):
        return pseudo_to_json(obj)
    if isinstance(obj, Grid):
        return grid_to_json(obj)
    if isinstance(obj, GridMap):
        return map_to_json(obj)
    if isinstance(obj, Category):
        return fincat_to_json(obj)
    raise PreconditionError(f"cannot serialize {type(obj).__name__}")


@main.command()
@click.option("--flavor", type=click.Choice(("discrete", "hd", "wg-strict", "segalic-transport", "corrupted")), required=True)
@click.option("--n", "n", type=int, default=2)
@click.option("--m", "m", type=int, default=3)
@click.option("--seed", type=int, default=0)
@click.option("--target", default="", help="Corruption target for the corrupted flavor.")
@click.option("--spec-only", is_flag=True, help="Write the generator spec instead of the instance.")
@click.option("--out", type=click.Path(), default=None)
def gen(flavor, n, m, seed, target, spec_only, out):
    """Generate an instance (or its spec) deterministically from a seed."""
    from .gen import GenSpec, generate

    spec = GenSpec(seed=seed, n=n, m=m, flavor=flavor, target=target)

    def run():
        payload = spec.to_json() if spec_only else instance_to_json(generate(spec))
        if out:
            _write(out, _dumps(payload))
            return {"written": str(out)}
        return {"instance": payload}

    _guard("gen", f"{flavor}/{seed}", run)


def spec_verdict(spec):
    """Run the checker a spec's flavor targets; ``"pass"`` or the failure tag."""
    from .gen import gen_corrupted, generate
    from .pseudo import check_segalic, validate_pseudo
    from .suite import fails_exactly
    from .wg import check_hd, check_wg

    try:
        if spec.flavor == "corrupted":
            base, bad = gen_corrupted(spec)
            return "pass" if fails_exactly(spec.target, base, bad) else "undetected"
        obj = generate(spec)
        if spec.flavor in ("discrete", "hd"):
            check_hd(obj)
        elif spec.flavor == "wg-strict":
            check_wg(obj)
        else:
            if spec.n == 2:
                validate_pseudo(obj)
            check_segalic(obj)
    except CheckFailure as e:
        return e.condition
    except WGCatError as e:
        return type(e).__name__
    return "pass"


@main.command()
@click.argument("specs", nargs=-1)
@click.option("--suite", type=click.Choice(("acceptance",)), default=None, help="Run the acceptance suite.")
@click.option("--criteria", default="", help="Comma-separated criterion numbers (default: all).")
@click.option("--make", "make_dir", type=click.Path(), default=None, help="Write a corpus of specs here.")
@click.option("--count", type=int, default=5, help="Seeds per flavor for --make.")
@click.option("--out", type=click.Path(), default=None, help="CSV summary path (default stdout).")
def corpus(specs, suite, criteria, make_dir, count, out):
    """Run spec files or the acceptance suite and write a CSV summary."""
    from .gen import FLAVORS, GenSpec

    if make_dir:
        for flavor in FLAVORS:
            for seed in range(count):
                spec = GenSpec(seed=seed, flavor=flavor, target="cocycle" if flavor == "corrupted" else "")
                _write(Path(make_dir) / flavor / f"{seed}.json", _dumps(spec.to_json()))
    rows, failed = [], False
    for p in specs:
        try:
            spec = GenSpec.from_json(_read_json(p))
        except _Exit as e:
            click.echo(_dumps({"instance": p, **e.report}), err=True)
            sys.exit(e.code)
        except TypeError as e:
            click.echo(f"{p}: not a generator spec: {e}", err=True)
            sys.exit(EXIT_PRECONDITION)
        verdict = spec_verdict(spec)
        failed = failed or verdict != "pass"
        rows.append({"instance": p, "flavor": spec.flavor, "n": spec.n, "seed": spec.seed, "verdict": verdict})
    if suite:
        from .suite import run_suite

        numbers = {int(c) for c in criteria.split(",") if c.strip()}
        results = run_suite(numbers or None, echo=lambda line: click.echo(line, err=True))
        failed = failed or not all(r.passed for r in results)
        rows.extend(r.row() for r in results)
    buf = io.StringIO()
    if rows:
        fields = list(dict.fromkeys(k for r in rows for k in r))
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    if out:
        try:
            _write(out, buf.getvalue())
        except _Exit as e:
            sys.exit(e.code)
    else:
        click.echo(buf.getvalue(), nl=False)
    sys.exit(EXIT_FAIL if failed else EXIT_PASS)


if __name__ == "__main__":
    main()
