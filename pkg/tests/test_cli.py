import json
import subprocess
import sys

import pytest

from meandim.cli import main

SHIFT = '{"kind":"symbolic","alphabet":[0,1],"period":2,"window":4}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cover(capsys):
    code, out, _ = run(capsys, "cover", "--system", SHIFT, "--phi", "x0", "--eps", "0.5,0.25", "--N", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "N,eps,log_cov_bits,rate,mode"
    assert len(lines) == 5


def test_hausdorff_widim_rd(capsys):
    assert run(capsys, "hausdorff", "--system", SHIFT, "--eps", "0.5", "--grain", "0")[0] == 0
    code, out, _ = run(capsys, "widim", "--system", SHIFT, "--eps", "0.5", "--variant", "standard")
    assert code == 0 and "widim_upper" in out
    code, out, _ = run(capsys, "rd", "--system", SHIFT, "--measure", '{"kind":"uniform"}',
                       "--N", "1,2", "--eps", "0.5,1.0")
    assert code == 0 and out.count("\n") == 5


def test_frostman_and_tiling(capsys):
    code, out, _ = run(capsys, "frostman", "--system", SHIFT, "--s", "1", "--delta", "2", "--grain", "0.1")
    assert code == 0 and json.loads(out)["duality_gap"] <= 1e-9
    code, out, _ = run(capsys, "tiling", "--system", '{"kind":"cycle","p":3}', "--psi",
                       '{"kind":"points","points":["0"]}', "--point", "1", "--horizon", "12", "--exact")
    data = json.loads(out)
    assert code == 0 and data["point"] == "1" and data["boundary"][3:5] == ["1/2", "7/2"]


def test_verify_chain_dir(capsys, tmp_path):
    scen = json.dumps({"system": json.loads(SHIFT), "potential": "x0", "eps": [0.5], "N_max": 1})
    code, _, _ = run(capsys, "verify-chain", "--scenario", scen, "--out", str(tmp_path))
    assert code == 0
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["ok"] and (tmp_path / "cells.csv").exists() and (tmp_path / "checks.csv").exists()


def test_errors_and_flags(capsys):
    code, _, err = run(capsys, "cover", "--system", '{"kind":"nope"}', "--eps", "0.5")
    assert code == 1 and "error" in err
    code, _, _ = run(capsys, "--seed", "3", "cover", "--system", SHIFT, "--eps", "0.5", "--threads", "2")
    assert code == 0
    with pytest.raises(SystemExit):
        main(["cover"])


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and out.count("PASS") == 4


def test_entry_point_module():
    res = subprocess.run([sys.executable, "-m", "meandim.cli", "example-hilbert", "--m", "6",
                          "--p", "2", "--W", "6", "--k", "1"], capture_output=True, text=True)
    assert res.returncode in (0, 2)
    assert json.loads(res.stdout)["m"] == 6
