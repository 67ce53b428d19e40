import json
import random

import pytest
from click.testing import CliRunner

from wgcat.cli import main
from wgcat.fincat import cyclic_group_cat, d_discrete, fincat_to_json, ordinal_cat, product, to_fincat
from wgcat.gen import GenSpec, cell_grid, corrupt, random_retract, transport_to_pseudo
from wgcat.nfold import external_product
from wgcat.pseudo import pseudo_to_json
from wgcat.simplex import grid_to_json, nerve


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def write(path, obj):
    path.write_text(json.dumps(obj))
    return path


def report(result):
    return json.loads(result.stdout)


def test_validate_valid_category(tmp_path):
    p = write(tmp_path / "c.json", fincat_to_json(ordinal_cat(2)))
    r = run("validate", p, "--kind", "fincat")
    assert r.exit_code == 0
    assert report(r)["verdict"] == "pass"


def test_validate_corrupted_category_names_condition(tmp_path):
    bad = corrupt(to_fincat(product(ordinal_cat(1), cyclic_group_cat(2))), "associativity", random.Random(0))
    r = run("validate", write(tmp_path / "c.json", fincat_to_json(bad)))
    assert r.exit_code == 1
    assert report(r)["condition"] == "associativity"


def test_missing_file_is_io_error(tmp_path):
    assert run("validate", tmp_path / "none.json").exit_code == 4


def test_malformed_json_is_format_error(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    assert run("validate", p).exit_code == 2


def test_wrong_kind_is_precondition(tmp_path):
    p = write(tmp_path / "c.json", fincat_to_json(ordinal_cat(1)))
    assert run("validate", p, "--kind", "grid").exit_code == 2


def test_check_writes_and_rechecks_certificate(tmp_path):
    x = external_product([d_discrete("ab"), d_discrete("xy")])
    p = write(tmp_path / "x.json", grid_to_json(x))
    cert = tmp_path / "hd.cert"
    assert run("check", p, "--property", "hd", "--out", cert).exit_code == 0
    assert json.loads(cert.read_text())["n"] == 2
    assert run("check", p, "--property", "hd", "--recheck", cert).exit_code == 0
    stored = json.loads(cert.read_text())
    stored["n"] = 5
    write(cert, stored)
    assert run("check", p, "--property", "hd", "--recheck", cert).exit_code == 1


def test_check_wg_failure_exit_code(tmp_path):
    x = external_product([ordinal_cat(1), ordinal_cat(1)])
    r = run("check", write(tmp_path / "x.json", grid_to_json(x)), "--property", "wg")
    assert r.exit_code == 1
    assert report(r)["condition"] == "wg:a"


def test_reports_are_reproducible(tmp_path):
    spec = write(tmp_path / "s.json", GenSpec(2, flavor="wg-strict").to_json())
    a = run("check", spec, "--property", "wg")
    b = run("check", spec, "--property", "wg")
    assert a.exit_code == 0 and a.stdout == b.stdout


def test_gen_round_trip(tmp_path):
    out = tmp_path / "g.json"
    assert run("gen", "--flavor", "hd", "--seed", 4, "--out", out).exit_code == 0
    assert run("validate", out, "--kind", "grid").exit_code == 0
    assert run("check", out, "--property", "hd").exit_code == 0


def test_gen_spec_only(tmp_path):
    out = tmp_path / "s.json"
    assert run("gen", "--flavor", "segalic-transport", "--seed", 1, "--spec-only", "--out", out).exit_code == 0
    assert json.loads(out.read_text())["flavor"] == "segalic-transport"


def test_strictify_strict_input(tmp_path):
    p = write(tmp_path / "n.json", grid_to_json(nerve(d_discrete("a"))))
    r = run("strictify", p, "--out", tmp_path / "out")
    assert r.exit_code == 0
    assert {"result.json", "wg_certificate.json", "L.json"} <= set(report(r)["files"])
    res = json.loads((tmp_path / "out" / "result.json").read_text())
    assert res["lemma"]["structure"] is True
    assert run("check", tmp_path / "out" / "L.json", "--property", "wg").exit_code == 0
    labels = json.loads((tmp_path / "out" / "L.json").read_text())["object_labels"]
    assert [len(v) for _, v in labels] == [10, 20, 35, 56]


def test_strictify_transported_pseudo(tmp_path):
    x = cell_grid(1, 2, 1)
    h = transport_to_pseudo(x, {(1,): random_retract(x, random.Random(0))})
    p = write(tmp_path / "h.json", pseudo_to_json(h))
    assert run("check", p, "--property", "segalic").exit_code == 0
    r = run("strictify", p, "--out", tmp_path / "out", "--dump-free")
    assert r.exit_code == 0
    assert "free.json" in report(r)["files"]


def test_strictify_refuses_non_segalic(tmp_path):
    x = external_product([ordinal_cat(1), ordinal_cat(1)])
    r = run("strictify", write(tmp_path / "x.json", grid_to_json(x)), "--out", tmp_path / "out")
    assert r.exit_code == 2


def test_corpus_empty_is_noop():
    r = run("corpus")
    assert r.exit_code == 0 and r.stdout == ""


def test_corpus_specs_and_injected_corruption(tmp_path):
    good = write(tmp_path / "a.json", GenSpec(0, flavor="hd").to_json())
    bad = write(tmp_path / "b.json", GenSpec(0, flavor="corrupted", target="segal").to_json())
    out = tmp_path / "summary.csv"
    r = run("corpus", good, bad, "--out", out)
    assert r.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "instance,flavor,n,seed,verdict"
    assert all(line.endswith(",pass") for line in lines[1:])


def test_corpus_counts_failures(tmp_path, monkeypatch):
    import wgcat.cli

    spec = write(tmp_path / "w.json", GenSpec(0, n=2, flavor="wg-strict").to_json())
    monkeypatch.setattr(wgcat.cli, "spec_verdict", lambda spec: "wg:c")
    r = run("corpus", spec)
    assert r.exit_code == 1
    assert r.stdout.splitlines()[1].endswith(",wg:c")


def test_corpus_make(tmp_path):
    r = run("corpus", "--make", tmp_path / "corpus", "--count", 1)
    assert r.exit_code == 0
    specs = sorted((tmp_path / "corpus").rglob("*.json"))
    assert len(specs) == 5
    assert run("corpus", *specs).exit_code == 0


def test_corpus_suite_subset():
    r = run("corpus", "--suite", "acceptance", "--criteria", "4")
    assert r.exit_code == 0
    assert "criterion" in r.stdout.splitlines()[0]
