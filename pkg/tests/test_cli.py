import io
import json
import subprocess
import sys

import numpy as np
import pytest

import catspread as cs
from catspread.cli import main
from catspread.io import format_number, parse_measure, read_pmf


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return write


# -- measure -----------------------------------------------------------------

def test_measure_dvar_half(files):
    assert run("measure", files("h.json", '{"probs": [0.5, 0.5]}'), "dvar") \
        == (0, "0.707106781187\n")


def test_measure_alg1_half(files):
    assert run("measure", files("h.json", '{"probs": [0.5, 0.5]}'), "alg:p=1") \
        == (0, "1.000000000000\n")


def test_measure_bad_sum(files, capsys):
    code, out = run("measure", files("b.json", '{"probs": [0.4, 0.4]}'), "dvar")
    assert code == 2 and out == ""
    err = capsys.readouterr().err
    assert err.count("\n") == 1 and "0.8" in err


def test_measure_renormalize(files):
    p = files("b.json", '{"probs": [0.4, 0.4]}')
    assert run("measure", p, "dvar", "--renormalize") == (0, "0.707106781187\n")
    assert run("measure", files("c.json", '{"probs": [0.1, 0.1]}'), "gini",
               "--renormalize")[0] == 2


def test_measure_csv_input(files):
    p = files("p.csv", "label,prob\nx,0.25\ny,0.75\n")
    code, out = run("measure", p, "gini")
    assert code == 0 and out == format_number(2 * 0.25 * 0.75) + "\n"


@pytest.mark.parametrize("flags,spec", [
    (["--alpha", "0.5"], cs.AlphaPower(0.5)),
    (["--sigma2", "2"], cs.GaussianKernel(2.0)),
    (["--c1", "0", "--c2", "3"], cs.TwoConstant(0.0, 3.0)),
])
def test_measure_distance_flags(files, flags, spec):
    p = files("p.json", '{"probs": [0.2, 0.3, 0.5]}')
    code, out = run("measure", p, "dvar", *flags)
    assert code == 0
    assert out == format_number(cs.distance_variance((0.2, 0.3, 0.5), spec)) + "\n"


@pytest.mark.parametrize("argv", [
    ["dvar", "--alpha", "1", "--sigma2", "1"],
    ["gini", "--alpha", "1"],
    ["dvar", "--alpha", "7"],
    ["nosuch"],
    ["tsallis"],
    ["geom:w=cube"],
])
def test_measure_usage_errors(files, argv):
    p = files("p.json", '{"probs": [0.5, 0.5]}')
    assert run("measure", p, *argv)[0] == 1


def test_measure_missing_file(tmp_path):
    assert run("measure", tmp_path / "none.json", "dvar")[0] == 2


@pytest.mark.parametrize("text", ["{not json", '{"x": 1}', "a,b\n", "h,p\nx,abc\n",
                                  '{"probs": [1.2, -0.2]}'])
def test_measure_parse_failures(files, text):
    assert run("measure", files("p.txt", text), "dvar")[0] == 2


@pytest.mark.parametrize("spec", ["dvar", "dvar:alpha=0.5", "dvar:sigma2=0.7",
                                  "dvar:c1=0,c2=2", "gini", "shannon", "extropy",
                                  "tsallis:m=1.5", "geom:w=sin,l=1,p=1",
                                  "geom:w=exp", "geom:w=pow2,l=2,p=2", "alg:p=inf",
                                  "alg:p=3"])
def test_round_trip(files, spec):
    rng = np.random.default_rng(abs(hash(spec)) % 2**32)
    for i in range(5):
        K = int(rng.integers(2, 7))
        probs = rng.dirichlet(np.ones(K)).tolist()
        p = files("r%d.json" % i, json.dumps({"probs": probs}))
        code, out = run("measure", p, spec)
        assert code == 0
        assert out == format_number(parse_measure(spec)(read_pmf(p))) + "\n"


# -- estimate ----------------------------------------------------------------

def test_estimate_aabb(files):
    code, out = run("estimate", files("s.txt", "a\na\nb\nb\n"), "--method", "ustat")
    assert code == 0
    assert out.startswith('{"estimate": 1.333333333333,')
    doc = json.loads(out)
    assert doc == {"estimate": 1.333333333333, "method": "ustat", "n": 4, "K": 2}


def test_estimate_constant_ustat(files):
    doc = json.loads(run("estimate", files("s.txt", "z\n" * 9))[1])
    assert doc["estimate"] == 0


def test_estimate_constant_paper(files):
    code, out = run("estimate", files("s.txt", "z\nz\nz\nz\n"), "--method", "paper")
    assert code == 0 and json.loads(out)["estimate"] == -24


def test_estimate_ci(files):
    text = "# comment\n\n" + "".join("abcab"[i % 5] + "\n" for i in range(30))
    code, out = run("estimate", files("s.txt", text), "--ci", "0.9")
    doc = json.loads(out)
    assert code == 0 and set(doc) >= {"estimate", "se", "ci", "n", "K", "method"}
    assert doc["ci"][0] < doc["estimate"] < doc["ci"][1]


def test_estimate_undersized(files, capsys):
    assert run("estimate", files("s.txt", "a\nb\nc\n"))[0] == 2
    assert "n = 4" in capsys.readouterr().err
    assert run("estimate", files("t.txt", "a\nb\nc\nd\n"), "--ci", "0.95")[0] == 2
    assert "n = 5" in capsys.readouterr().err


def test_estimate_bad_level(files):
    assert run("estimate", files("s.txt", "a\nb\n" * 5), "--ci", "1.5")[0] == 1
    assert run("estimate", files("s.txt", "a\nb\n" * 5), "--method", "x")[0] == 1


def test_estimate_empty_file(files):
    assert run("estimate", files("s.txt", "# nothing\n\n"))[0] == 2


# -- axioms ------------------------------------------------------------------

def test_axioms_dvar_fails(capsys):
    code, out = run("axioms", "--measure", "dvar", "--kmin", 3, "--kmax", 6)
    assert code == 3
    doc = json.loads(out)
    a3 = doc["axioms"]["A3"]
    assert a3["status"] == "Fail" and a3["counterexamples"]
    assert {"pi", "piPrime", "value", "valuePrime"} <= set(a3["counterexamples"][0])
    assert {"measure", "seed", "trials", "axioms"} <= set(doc)


def test_axioms_tsallis_passes():
    assert run("axioms", "--measure", "tsallis:m=2", "--kmin", 2, "--kmax", 6)[0] == 0


def test_axioms_dvar_k2_passes():
    assert run("axioms", "--measure", "dvar", "--kmin", 2, "--kmax", 2)[0] == 0


def test_axioms_json_byte_identical():
    argv = ("axioms", "--measure", "dvar", "--kmin", 2, "--kmax", 5, "--trials", 400,
            "--seed", 11, "--additivity")
    assert run(*argv) == run(*argv)


def test_axioms_text_report():
    code, out = run("axioms", "--measure", "gini", "--kmax", 4, "--report", "text")
    assert code == 0 and "A3" in out and "Pass" in out


@pytest.mark.parametrize("argv", [["--measure", "bogus"],
                                  ["--measure", "gini", "--kmin", 1],
                                  ["--measure", "gini", "--kmin", 5, "--kmax", 3],
                                  ["--measure", "gini", "--trials", 0],
                                  ["--measure", "gini", "--report", "xml"]])
def test_axioms_usage(argv):
    assert run("axioms", *argv)[0] == 1


# -- majorize ----------------------------------------------------------------

def test_majorize_strict_pair(files):
    a = files("a.json", '{"probs": [0.16666666666666666, 0.16666666666666666, '
                        '0.3333333333333333, 0.3333333333333333]}')
    b = files("b.json", '{"probs": [0.1, 0.2, 0.3, 0.4]}')
    assert run("majorize", a, b) == (0, "StrictlyMajorizedBy\n")
    assert run("majorize", b, a) == (0, "StrictlyMajorizes\n")


def test_majorize_identical(files):
    a = files("a.json", '{"probs": [0.2, 0.8]}')
    assert run("majorize", a, a) == (0, "EqualUpToPermutation\n")


def test_majorize_incomparable(files):
    a = files("a.json", '{"probs": [0.5, 0.5, 0]}')
    b = files("b.json", '{"probs": [0.6, 0.2, 0.2]}')
    assert run("majorize", a, b) == (0, "Incomparable 2\n")


def test_majorize_verbose_and_padding(files):
    a = files("a.json", '{"probs": [0.5, 0.5]}')
    b = files("b.csv", "label,p\nx,0.7\ny,0.2\nz,0.1\n")
    assert run("majorize", a, b) == (0, "Incomparable 2\n")
    u = files("u.json", '{"probs": [0.25, 0.25, 0.25, 0.25]}')
    assert run("majorize", u, a, "--verbose") == (0, "StrictlyMajorizedBy 1\n")


def test_majorize_parse_error(files, tmp_path):
    a = files("a.json", '{"probs": [0.5, 0.5]}')
    assert run("majorize", a, files("b.json", "{broken"))[0] == 2
    assert run("majorize", a, tmp_path / "missing.json")[0] == 2


# -- figures -----------------------------------------------------------------

def test_figures_which_2():
    code, out = run("figures", "--which", 2)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "K,distance_variance" and len(lines) == 5
    vals = [float(l.split(",")[1]) for l in lines[1:]]
    assert vals[0] == 0 and vals[1] > vals[2] > vals[3]
    assert vals[3] == pytest.approx(6 ** 0.5 / 4, abs=1e-12)


def test_figures_which_3(tmp_path):
    path = tmp_path / "f3.csv"
    assert run("figures", "--which", 3, "--out", path) == (0, "")
    rows = dict(l.split(",") for l in path.read_text().splitlines()[1:])
    assert float(rows["case1"]) > float(rows["case2"])
    assert path.read_text().splitlines()[0] == "case,distance_variance"


def test_figures_errors(tmp_path):
    assert run("figures", "--which", 5)[0] == 1
    assert run("figures", "--which", 2, "--out", tmp_path / "no" / "x.csv")[0] == 2


def test_no_command():
    assert run()[0] == 1


def test_console_entry(files):
    p = files("h.json", '{"probs": [0.5, 0.5]}')
    proc = subprocess.run([sys.executable, "-m", "catspread", "measure", str(p), "dvar"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0.707106781187\n"
