import json

import pytest

from chabtree.cli import load_config, main, run_command
from chabtree.errors import ChabtreeError
from chabtree.profile import clear_memory_cache


@pytest.fixture
def t3_file(tmp_path):
    path = tmp_path / "t3.eig"
    path.write_text("v a color=0\nv b color=0\ne a b i12=3 i21=3\n")
    return path


def run(*argv, cache=None):
    args = list(argv)
    if cache is not None:
        args += ["--cache-dir", str(cache)]
    return run_command(args)


def test_profile_json(tmp_path):
    res = run("profile", "--spec", "preset t3sym", "--r", "2", "--mode", "json", cache=tmp_path)
    assert res.code == 0
    data = json.loads(res.stdout)
    assert data["size"] == 48 and data["root"] == "a" and data["exact"]


def test_text_and_json_carry_the_same_values(tmp_path):
    j = json.loads(run("profile", "--spec", "preset t3alt", "--r", "3", "--mode", "json", cache=tmp_path).stdout)
    t = run("profile", "--spec", "preset t3alt", "--r", "3", cache=tmp_path).stdout
    parsed = dict(line.split(": ", 1) for line in t.strip().splitlines())
    assert parsed["size"] == str(j["size"]) == "3"
    assert parsed["digest"] == j["digest"]


def test_repeat_runs_are_identical(tmp_path):
    argv = ("profile", "--spec", "preset t3sym", "--r", "3", "--mode", "json")
    clear_memory_cache()  # a fresh process, as on the command line
    first = run(*argv, cache=tmp_path / "one")
    again = run(*argv, cache=tmp_path / "one")
    fresh = run(*argv, "--threads", "3", cache=tmp_path / "two")
    assert first.stdout == again.stdout == fresh.stdout
    assert list((tmp_path / "one").glob("*.prof"))


def test_moving_profile(tmp_path):
    res = run("profile", "--spec", "preset t3sym", "--r", "1", "--D", "2", "--mode", "json", cache=tmp_path)
    assert json.loads(res.stdout)["size"] == 42


def test_quotient_formats(t3_file, tmp_path):
    spec = f"universal base={t3_file} a=Sym(3) b=Sym(3)"
    text = run("quotient", "--spec", spec, cache=tmp_path)
    assert text.code == 0 and "e a b i12=3 i21=3" in text.stdout
    js = json.loads(run("quotient", "--spec", spec, "--mode", "json", cache=tmp_path).stdout)
    assert js["edges"] == [{"u": "a", "w": "b", "i12": 3, "i21": 3}]
    dot = run("quotient", "--spec", spec, "--mode", "dot", cache=tmp_path)
    assert dot.stdout.lstrip().startswith(("graph", "digraph"))


def test_base_flag_with_relative_spec(t3_file, tmp_path):
    res = run("quotient", "--base", str(t3_file), "--spec", "universal a=Alt(3) b=Alt(3)", cache=tmp_path)
    assert res.code == 0


def test_not_locally_detectable_is_a_usage_error(tmp_path):
    base = tmp_path / "e23.eig"
    base.write_text("v a color=0\nv b color=0\ne a b i12=2 i21=3\n")
    res = run("quotient", "--base", str(base), "--spec", "universal a=Trivial(2) b=Trivial(3)",
              "--Rmax", "4", cache=tmp_path)
    assert res.code == 2 and "NotLocallyDetectable" in res.stderr


def test_capacity_exit_code(tmp_path):
    res = run("profile", "--spec", "preset t3sym", "--r", "9", cache=tmp_path)
    assert res.code == 3 and "capacity" in res.stderr


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("profile", "--r", "x"),
    ("profile", "--spec", "preset nope"),
    ("profile", "--spec", "universal a=Sym(4) b=Sym(3)", "--base", "missing.eig"),
    ("profile", "--spec", "preset t3sym", "--mode", "dot"),
    ("primes", "--spec", "preset t3sym", "--pi", "4"),
    ("agreement", "--spec", "preset t3sym"),
])
def test_usage_errors(argv, tmp_path):
    assert run(*argv, cache=tmp_path).code == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nspec = preset t3sym\nr = 1\nmode = json\n")
    res = run("profile", "--config", str(cfg), cache=tmp_path)
    assert json.loads(res.stdout)["size"] == 6
    res = run("profile", "--config", str(cfg), "--r", "2", cache=tmp_path)
    assert json.loads(res.stdout)["size"] == 48


def test_empty_config_gives_defaults(tmp_path):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("")
    c = load_config(cfg)
    assert (c.r, c.Rmax, c.mode, c.spec) == (2, 3, "text", None)


def test_bad_config_values(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mode = yaml\n")
    res = run("profile", "--config", str(cfg), "--spec", "preset t3sym", cache=tmp_path)
    assert res.code == 2 and "unknown output mode" in res.stderr
    cfg.write_text("spec = preset t3sym\ncolour = red\n")
    with pytest.raises(ChabtreeError, match="line 2"):
        load_config(cfg)
    cfg.write_text("r = two\n")
    with pytest.raises(ChabtreeError, match="integer"):
        load_config(cfg)


def test_analysis_commands(tmp_path):
    sym = ("--spec", "preset t3sym")
    out = json.loads(run("agreement", *sym, "--spec2", "kclosure k=1 of preset t3sym",
                         "--Rmax", "2", "--mode", "json", cache=tmp_path).stdout)
    assert out["r_star"] == 2
    out = json.loads(run("primes", *sym, "--n", "0", "--mode", "json", cache=tmp_path).stdout)
    assert out["primes"] == [2, 3]
    res = run("primes", *sym, "--pi", "2", "--r", "1", "--k", "2", "--depth", "2", "--mode", "json", cache=tmp_path)
    assert res.code == 0 and json.loads(res.stdout)["status"] == "conclusion holds"
    out = json.loads(run("torsion", *sym, "--p", "2", "--n", "1", "--M", "3", "--mode", "json", cache=tmp_path).stdout)
    assert out["holds"] is False
    out = json.loads(run("discrete", "--spec", "preset t3alt", "--mode", "json", cache=tmp_path).stdout)
    assert out["discrete"] is True
    assert run("closure", *sym, "--r", "2", cache=tmp_path).code == 0
    out = json.loads(run("plusk", "--spec", "preset t3alt", "--k", "1", "--r", "2", "--mode", "json", cache=tmp_path).stdout)
    assert out["size"] == 1


def test_tree_and_unimodular(t3_file, tmp_path):
    out = json.loads(run("tree", "--base", str(t3_file), "--r", "3", "--mode", "json", cache=tmp_path).stdout)
    assert out["sphere_sizes"] == [1, 3, 6, 12]
    out = json.loads(run("unimodular", "--base", str(t3_file), "--mode", "json", cache=tmp_path).stdout)
    assert out["unimodular"] is True


def test_valency1_command(tmp_path):
    res = run("valency1", "--mode", "json", cache=tmp_path)
    assert res.code == 0 and json.loads(res.stdout)["stabilizer_size"] == 360


def test_main_writes_streams(capsys, tmp_path):
    assert main(["profile", "--spec", "preset t3triv", "--r", "1", "--cache-dir", str(tmp_path)]) == 0
    assert "size: 1" in capsys.readouterr().out
