import io
import subprocess
import sys
from importlib.resources import files

import pytest

from nlrealise.cli import run_command

DATA = files("nlrealise").joinpath("data")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def data(name):
    return str(DATA.joinpath(name))


def test_bernoulli_output():
    code, out, _ = run("bernoulli", 4)
    assert code == 0
    assert out.splitlines()[2:] == ["1", "-1/2", "1/6", "0", "-1/30"]
    assert out.startswith("# command: nlrealise bernoulli 4\n# status: pass\n")


def test_validate_exit_codes():
    assert run("validate", data("sl2.alg"))[0] == 0
    assert run("validate", data("sl2_cone.dgla"))[0] == 0
    assert run("validate", data("leftmult.leibniz"))[0] == 0
    assert run("validate", data("nonleibniz.leibniz"))[0] == 1
    code, out, _ = run("validate", data("broken.alg"))
    assert code == 1
    assert "# status: fail" in out and "jacobi (a, b, c)" in out


def test_validate_reports_open_subalgebra(tmp_path):
    f = tmp_path / "open.alg"
    f.write_text((DATA.joinpath("sl2.alg").read_text()).replace("subalgebra h e", "subalgebra e f"))
    code, out, _ = run("validate", f)
    assert code == 1 and "[subalgebra]" in out


def test_realise_sl2():
    code, out, _ = run("realise", data("sl2.alg"), "--element", "e", "--max-order", 2)
    assert code == 0
    assert "e(2)(f,f) = -1 f" in out
    assert "e(p) vanishes on E-arguments for all p >= 3" in out
    code, out, _ = run("realise", data("sl2.alg"), "--element", "h", "--max-order", 1)
    assert "h(1)(f) = -2 f" in out


def test_realise_combination_uses_fresh_name():
    code, out, _ = run("realise", data("gl11.alg"), "--element", "u + 2 a", "--max-order", 0)
    assert code == 0 and "a'(0)() = 1 u" in out


def test_check_hom():
    code, out, _ = run("check-hom", data("sl2.alg"), "--max-degree", 3)
    assert code == 0
    assert out.count("[pair ") == 6
    code, out, _ = run("check-hom", data("gl11.alg"), "--max-degree", 2, "--pair", "u,v")
    assert code == 0 and "[pair u,v]" in out


def test_linfty_cross_check():
    code, out, _ = run("linfty", data("sl2_cone.dgla"), "--max-arity", 3, "--cross-check")
    assert code == 0
    assert "arity 3: match" in out and "order 3: zero" in out


def test_leibniz2dgla():
    code, out, _ = run("leibniz2dgla", data("leftmult.leibniz"))
    assert code == 0 and "[dgla]" in out and "dgla leftmult" in out
    assert run("leibniz2dgla", data("nonleibniz.leibniz"))[0] == 1


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["bernoulli", "-1"],
    ["bernoulli", "x"],
    ["realise", "sl2.alg", "--max-order", "1"],
    ["validate", "sl2.alg", "--unknown"],
    ["linfty", "sl2_cone.dgla", "--max-arity", "0"],
])
def test_usage_errors(argv, capsys):
    argv = [data(a) if a.endswith((".alg", ".dgla")) else a for a in argv]
    assert run_command(argv) == 2
    assert "usage:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["realise", "sl2.alg", "--element", "q", "--max-order", "1"],
    ["check-hom", "sl2.alg", "--max-degree", "1", "--pair", "e"],
    ["linfty", "sl2.alg", "--max-arity", "2"],
    ["leibniz2dgla", "sl2.alg"],
    ["validate", "/nonexistent/file.alg"],
])
def test_command_level_usage_errors(argv):
    argv = [data(a) if a in ("sl2.alg",) else a for a in argv]
    code, out, err = run(*argv)
    assert code == 2 and out == "" and err.startswith("nlrealise: error: ")


def test_missing_subalgebra_is_usage_error(tmp_path):
    f = tmp_path / "noh.alg"
    f.write_text("algebra noh\nbasis x parity=0\n")
    code, _, err = run("realise", f, "--element", "x", "--max-order", 1)
    assert code == 2 and "subalgebra" in err


def test_domain_errors(tmp_path):
    code, _, err = run("check-hom", data("broken.alg"), "--max-degree", 1)
    assert code == 1 and "invalid Lie superalgebra" in err
    f = tmp_path / "open.alg"
    f.write_text(DATA.joinpath("sl2.alg").read_text().replace("subalgebra h e", "subalgebra e f"))
    code, _, err = run("realise", f, "--element", "e", "--max-order", 1)
    assert code == 1
    bad = tmp_path / "bad.dgla"
    bad.write_text("dgla bad\nbasis a degree=0\nbasis b degree=1\nbasis c degree=2\n"
                   "differential c -> 1 b\ndifferential b -> 1 a\n")
    code, _, err = run("linfty", bad, "--max-arity", 2)
    assert code == 1 and "delta^2" in err


def test_output_is_deterministic():
    argv = ["linfty", data("sl2_cone.dgla"), "--max-arity", "3", "--cross-check"]
    first = subprocess.run([sys.executable, "-m", "nlrealise", *argv], capture_output=True, text=True)
    second = subprocess.run([sys.executable, "-m", "nlrealise", *argv], capture_output=True, text=True)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout == run(*argv)[1]
