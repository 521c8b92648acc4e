import csv
import io
import json
import os
import pathlib
import shlex
import subprocess
import sys

import pytest

from thetalab import cli

GOLDEN = pathlib.Path(__file__).parent / "golden"
sys.path.insert(0, str(GOLDEN))
from cases import CASES  # noqa: E402


def run(cmd, *extra):
    buf = io.StringIO()
    code = cli.run(shlex.split(cmd) + list(extra), stdout=buf)
    return code, buf.getvalue()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, out = run(CASES[name], "--format", "json")
    assert code == 0
    assert out == (GOLDEN / f"{name}.json").read_text(encoding="utf-8")
    cli.validate(json.loads(out))


def test_every_subcommand_has_a_schema_and_a_golden():
    commands = {shlex.split(c)[0] for c in CASES.values()} | {"selftest"}
    assert commands == set(cli.SCHEMAS)


def test_validate_rejects_drift():
    payload = json.loads((GOLDEN / "classify_half.json").read_text())
    del payload["result"]["left"]
    with pytest.raises(ValueError):
        cli.validate(payload)
    payload = json.loads((GOLDEN / "classify_half.json").read_text())
    payload["schema"] = "thetalab/0"
    with pytest.raises(ValueError):
        cli.validate(payload)


def test_classify_example():
    code, out = run("classify --xi 1/2 --format json")
    r = json.loads(out)["result"]
    assert code == 0 and r["point"] == "1/2"
    assert (r["two_sided"], r["right"], r["left"]) == ("none", "zero", "infinite")


def test_gauss_sum_example():
    code, out = run("gauss-sum --b 3 --a 1 --mode both --format json")
    r = json.loads(out)["result"]
    assert r["closed"]["text"] == "sqrt(3)*e^(i*2π/4)"
    assert r["brute"]["value"]["im"].startswith("1.7320508075")
    assert r["agree"] is True


def test_selftest_exit_zero():
    code, out = run("selftest --format json")
    assert code == 0
    assert json.loads(out)["result"]["all_passed"]


@pytest.mark.parametrize(
    "cmd,code",
    [
        ("classify --xi 1/0", 2),
        ("gauss-sum --b 0 --a 1", 2),
        ("reciprocity --p 4 --q 2", 2),
        ("theta --z -1i", 2),
        ("f-eval --z 2+", 2),
        ("classify --xi 1/2 --bogus", 2),
        ("nosuch", 2),
        ("classify --xi 1/2 --precision 32", 2),
        ("dc --x 0.3 --schedule 100000000", 2),
    ],
)
def test_exit_codes(cmd, code, capsys):
    assert run(cmd)[0] == code


def test_resource_error_exit_three(monkeypatch):
    def boom(*a, **k):
        raise cli.ResourceError("table too large")

    monkeypatch.setattr(cli, "liouville_sieve", boom)
    assert run("dc --x 0.3 --schedule 1000")[0] == 3


def test_csv_grid_output():
    code, out = run("ht3-probe --a 0.5 --b 2 --k-max 6 --format csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["k", "h", "quotient"]
    assert len(rows) == 7
    mant = rows[3][2].split("e")[0].lstrip("-").replace(".", "")
    assert len(mant) >= 17


def test_csv_expansion_header():
    code, out = run("expansion --xi 1/4 --steps 8 --format csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["h", "re_dF", "im_dF", "re_model", "im_model", "residual"]
    assert len(rows) == 1 + 16


def test_plain_output():
    code, out = run("classify --xi 2/4")
    assert code == 0
    assert "result.point: 1/2" in out.splitlines()


@pytest.mark.parametrize("name", ["gauss_sum_3_1", "expansion_half", "dc_quarter", "ht3_half_two"])
def test_deterministic_across_threads(name):
    outs = {run(CASES[name], "--format", "json", "--threads", t)[1] for t in ("1", "8", "auto", "1")}
    assert len(outs) == 1


def test_precision_env_override(monkeypatch):
    monkeypatch.setenv("THETALAB_PRECISION", "96")
    code, out = run("theta --z i --format json")
    assert json.loads(out)["precision"] == 96


def test_number_parser():
    from fractions import Fraction

    assert cli.parse_number("6/4", 64) == Fraction(3, 2)
    assert cli.parse_number("-(1/3)", 64) == Fraction(-1, 3)
    v = cli.parse_number("0.1+1e-6i", 128)
    assert abs(complex(v) - complex(0.1, 1e-6)) < 1e-18
    assert abs(float(cli.parse_real("pi/2", 128)) - 1.5707963267948966) < 1e-16
    with pytest.raises(cli.PreconditionError):
        cli.parse_number("__import__('os')", 64)


def test_console_entry_point():
    env = dict(os.environ)
    proc = subprocess.run(
        [sys.executable, "-m", "thetalab", "classify", "--xi", "3/5", "--format", "json"],
        capture_output=True, text=True, env=env, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["two_sided"] == "derivative_zero_for_g"
