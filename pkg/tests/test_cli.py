import json
import re
import subprocess
import sys

import pytest

from localities.cli import ConfigError, RunConfig, main, parse_normal_spec, run_suite
from localities.fileio import dumps, load
from localities.zoo import load_example

TIMING = re.compile(r"# ---- timing.*?# ---- end timing ----\n", re.S)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def without_timing(text):
    return TIMING.sub("", text)


@pytest.fixture(scope="module")
def mutated(tmp_path_factory):
    """O4plus2:all with one pair-table entry redirected."""
    text = dumps(load_example("O4plus2:all"))
    assert "pair 5 7 4\n" in text
    path = tmp_path_factory.mktemp("mut") / "bad.pg"
    path.write_text(text.replace("pair 5 7 4\n", "pair 5 7 5\n"))
    return str(path)


# -- exit codes ------------------------------------------------------------------------

def test_clean_instance_exits_zero(capsys):
    code, out, _ = run(capsys, "verify", "example:S3:delta-C3")
    assert code == 0
    assert "# summary: PASS=" in out and " FAIL=0 " in out
    assert all(re.fullmatch(r"LEMMA \S+ (PASS|SKIP)( \S+=\S+)*", line)
               for line in out.splitlines() if line.startswith("LEMMA"))


def test_mutated_instance_exits_one_with_witness(capsys, mutated):
    code, out, _ = run(capsys, "verify", mutated, "--suite", "axioms")
    assert code == 1
    fails = [line for line in out.splitlines() if " FAIL " in line]
    assert fails and all("witness=" in line for line in fails)


@pytest.mark.parametrize("argv", [
    ["verify", "example:S3:delta-C3", "--bound", "1"],
    ["verify", "example:S3:delta-C3", "--bound", "5"],
    ["verify", "example:GL3_2:all", "--bound", "4", "--suite", "axioms"],
    ["verify", "example:S3:delta-C3", "--workers", "0"],
    ["verify", "example:S3:delta-C3", "--normal", "2"],
    ["verify", "example:S3:delta-C3", "--normal", "gen:99"],
    ["verify", "example:nope"],
    ["verify", "/nonexistent.pg"],
    ["normals", "example:free1"],
    ["quotient", "example:S4:all", "--normal", "all", "-o", "/tmp/never-written.pg"],
    ["product", "example:S4:all", "--m", "all", "--n", "gen:1"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error: ")


def test_malformed_file_exits_two_with_line(capsys, tmp_path):
    bad = tmp_path / "bad.pg"
    bad.write_text("partialgroup n=2\nidentity 0\ninv 0 0\ninv 1 1\npair 0 9 1\n")
    code, _, err = run(capsys, "verify", str(bad))
    assert code == 2 and "line 5" in err


def test_argparse_rejects_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "example:free1", "--suite", "everything"])
    assert exc.value.code == 2


# -- output shape -------------------------------------------------------------------------

def test_json_mirrors_text(capsys):
    _, text, _ = run(capsys, "verify", "example:D8:sylow")
    _, js, _ = run(capsys, "verify", "example:D8:sylow", "--json")
    data = json.loads(js)
    lines = [line for line in text.splitlines() if line.startswith("LEMMA")]
    checks = [c for s in data["sections"] for c in s["checks"]]
    assert len(lines) == len(checks)
    for line, c in zip(lines, checks):
        assert line.split()[1:3] == [c["id"], c["status"]]
    assert data["summary"]["FAIL"] == 0
    assert data["instance"]["instance"] == "D8:sylow"


def test_output_is_deterministic_across_workers(capsys):
    _, one, _ = run(capsys, "verify", "example:C3xD8:sylow")
    _, four, _ = run(capsys, "verify", "example:C3xD8:sylow", "--workers", "4")
    assert without_timing(one) == without_timing(four)
    assert "# ---- timing (varies between runs) ----" in one


def test_free_partial_group_skips_locality_suites(capsys):
    code, out, _ = run(capsys, "verify", "example:free1")
    assert code == 0
    for suite in ("locality", "normal", "quotient", "products"):
        assert f"LEMMA {suite}.suite SKIP note=not-a-locality" in out
    assert "LEMMA axiom.short-words PASS" in out


def test_suite_selection(capsys):
    _, out, _ = run(capsys, "verify", "example:S4:all", "--suite", "products")
    ids = {line.split()[1] for line in out.splitlines() if line.startswith("LEMMA")}
    assert ids and all(i.startswith(("product.", "disjoint.")) for i in ids)


def test_bound_four_on_small_instance(capsys):
    code, out, _ = run(capsys, "verify", "example:D8:sylow", "--suite", "axioms", "--bound", "4")
    assert code == 0 and "bound=4" in out


# -- subcommands ----------------------------------------------------------------------------

def test_build_writes_loadable_file(capsys, tmp_path):
    path = tmp_path / "s4.pg"
    code, out, _ = run(capsys, "build", "example:S4:all", "-o", str(path))
    assert code == 0 and "|L|=24" in out
    assert dumps(load(str(path))) == dumps(load_example("S4:all"))


def test_normals_listing(capsys):
    code, out, _ = run(capsys, "normals", "example:S4:all")
    sizes = [int(re.search(r"size=(\d+)", line).group(1)) for line in out.splitlines()]
    assert code == 0 and sizes == [1, 4, 12, 24]


def test_quotient_writes_a_locality(capsys, tmp_path):
    path = tmp_path / "q.pg"
    code, out, _ = run(capsys, "quotient", "example:O4plus2:all", "--normal", "gen:1", "-o", str(path))
    assert code == 0 and "# blocks:" in out
    q = load(str(path))
    assert q.n < 72
    code, _, _ = run(capsys, "verify", str(path), "--suite", "locality")
    assert code == 0


def test_product_subcommand(capsys):
    code, out, _ = run(capsys, "product", "example:C3xD8:sylow", "--m", "gen:1", "--n", "gen:2", "--json")
    data = json.loads(out)
    assert code == 0 and data["sections"][0]["title"] == "product"


def test_report_includes_every_suite(capsys):
    code, out, _ = run(capsys, "report", "example:S3:delta-C3")
    assert code == 0
    for head in ("# axioms", "# objectivity", "# locality", "# normal N0", "# quotient N0",
                 "# correspondence N0", "# first isomorphism", "# theta", "# product N0 N1"):
        assert head in out


C2_A5 = """\
group
(1 2 3 4 5)
(1 2 3)
(6 7)
end
prime p=2
sylow auto
delta seed
(6 7)
end
"""


def test_theta_hypothesis_failure_is_a_skip(capsys, tmp_path):
    # the central involution is an object whose normalizer C2 x A5 has no p'-core
    path = tmp_path / "c2a5.txt"
    path.write_text(C2_A5)
    code, out, _ = run(capsys, "verify", str(path), "--suite", "quotient", "--normal", "gen:0")
    assert code == 0
    assert "LEMMA theta.hypothesis SKIP" in out


# -- programmatic entry points ---------------------------------------------------------------

def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("x", suite="nope").validate()
    assert RunConfig("x").suites == ("axioms", "locality", "normal", "quotient", "products")
    assert RunConfig("x", suite="normal").suites == ("normal",)


def test_run_suite_accepts_a_built_object():
    loc = load_example("D8:sylow")
    res = run_suite(RunConfig("unused", suite="locality"), obj=loc)
    assert res.ok and res.counts()["FAIL"] == 0
    assert "timing" in res.as_dict() and "timing" not in res.as_dict(timing=False)


def test_parse_normal_spec():
    loc = load_example("S4:all")
    assert len(parse_normal_spec(loc, "all")) == 4
    assert len(parse_normal_spec(loc, "gen:0")[0]) == 1
    with pytest.raises(ConfigError):
        parse_normal_spec(loc, "gen:a")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "localities", "normals", "example:S3:delta-C3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("N0 size=1")
