import json
import os
import subprocess
import sys

import pytest

from dkcodes.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_capacity(capsys):
    code, out, _ = run(capsys, "capacity", "--d", "1", "--k", "3")
    assert code == 0
    assert json.loads(out)["capacity"] == pytest.approx(0.5515, abs=5e-5)


def test_capacity_infinite(capsys):
    code, out, _ = run(capsys, "capacity", "--d", "1", "--k", "inf")
    assert json.loads(out)["lambda"] == pytest.approx(1.6180339887, abs=1e-9)


def test_optimize(capsys):
    code, out, _ = run(capsys, "optimize", "--d", "2", "--k", "5")
    rep = json.loads(out)
    assert code == 0 and rep["j_star"] == 3


@pytest.mark.parametrize(
    "algo_args",
    [
        ["--algo", "ss", "--d", "1", "--k", "3"],
        ["--algo", "ss", "--d", "2", "--k", "inf"],
        ["--algo", "ss", "--d", "2", "--k", "7", "--j", "3", "--p", "0.6"],
        ["--algo", "il", "--d", "0", "--k", "11"],
    ],
)
def test_encode_decode_file_roundtrip(capsys, tmp_path, algo_args):
    src = tmp_path / "in.bin"
    src.write_bytes(os.urandom(3000))
    enc, dec = tmp_path / "x.dk", tmp_path / "out.bin"
    assert main(["encode", *algo_args, "--in", str(src), "--out", str(enc)]) == 0
    assert main(["decode", "--in", str(enc), "--out", str(dec)]) == 0
    assert dec.read_bytes() == src.read_bytes()
    d, k = algo_args[3], algo_args[5]
    capsys.readouterr()
    assert main(["check", "--in", str(enc), "--d", d, "--k", k]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_check_raw_file_failure(capsys, tmp_path):
    f = tmp_path / "raw.bin"
    f.write_bytes(b"\xff")
    code, out, _ = run(capsys, "check", "--in", str(f), "--d", "1", "--k", "3")
    assert code == 1
    assert not json.loads(out)["ok"]


def test_decode_garbage_is_failure(capsys, tmp_path):
    f = tmp_path / "junk"
    f.write_bytes(b"junk")
    code, _, err = run(capsys, "decode", "--in", str(f), "--out", str(tmp_path / "o"))
    assert code == 1 and "magic" in err


def test_usage_errors(capsys):
    assert run(capsys, "capacity", "--d", "3", "--k", "1")[0] == 2
    assert run(capsys, "factor", "--d", "1", "--k", "3")[0] == 2
    assert run(capsys, "encode", "--algo", "il", "--d", "1", "--k", "4", "--j", "1", "--in", "x", "--out", "y")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_simulate_json(capsys):
    code, out, _ = run(capsys, "simulate", "--algo", "il", "--d", "1", "--k", "4", "--bits", "20000", "--seed", "5", "--json")
    rep = json.loads(out)
    assert code == 0
    assert set(rep) >= {"constraint", "algorithm", "analytic_rate", "empirical_rate", "capacity", "efficiency", "n_bits", "seed"}
    assert rep["seed"] == 5


def test_factor_output(capsys):
    code, out, _ = run(capsys, "factor", "--d", "0", "--k", "11")
    assert code == 0
    assert "2 * 2 * 3" in out
    assert "1011  ->  00000001" in out


def test_table4_csv(capsys):
    code, out, _ = run(capsys, "table4", "--csv")
    assert code == 0 and out.count("\n") == 8


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dkcodes", "capacity", "--d", "0", "--k", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["lambda"] == pytest.approx((1 + 5**0.5) / 2)
