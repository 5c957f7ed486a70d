import json
import math

import numpy as np
import pytest

from scaleop.cli import main
from scaleop.field import get_field
from scaleop.grid import GridFunction, RadialFunction


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- verify ------------------------------------------------------------------------


def test_verify_passing_suite(capsys):
    code, out, _ = run(["verify", "--suite", "l2identity", "--q", "7", "--d", "2"], capsys)
    assert code == 0
    assert "[PASS]" in out and "[FAIL]" not in out


def test_verify_failing_oscillation_check(capsys):
    code, out, _ = run(["verify", "--suite", "osc", "--q", "3", "--n", "6"], capsys)
    assert code == 1
    assert "[FAIL]" in out


def test_verify_oscillation_example(capsys):
    code, out, _ = run(["verify", "--suite", "osc", "--q", "7", "--n", "4"], capsys)
    assert code == 0
    assert "42" in out  # 6 * q


def test_verify_even_q_is_usage_error(capsys):
    code, _, err = run(["verify", "--q", "4"], capsys)
    assert code == 2
    assert "rejected" in err


def test_verify_report_file(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, _, _ = run(
        ["verify", "--suite", "sphere_sizes", "--q", "5,7", "--out", str(out_path)], capsys
    )
    assert code == 0
    report = json.loads(out_path.read_text())
    assert report["passed"] is True
    assert all(c["criterion"] == 9 for c in report["checks"])


# -- scan --------------------------------------------------------------------------


def test_scan_csv_shape_and_determinism(tmp_path, capsys):
    args = [
        "scan", "--d", "2", "--qs", "3,5,7,11,13", "--grid", "9",
        "--families", "delta,subspace,sphere0,sphere1,exponential,radial",
    ]
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    code1, _, _ = run(args + ["--threads", "1", "--out", str(out1)], capsys)
    code2, _, _ = run(args + ["--threads", "4", "--out", str(out2)], capsys)
    assert code1 == code2 == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    lines = b1.decode().strip().splitlines()
    assert lines[0] == "d,q,p_inv,s_inv,family,lower,upper,in_general,in_radial,flags"
    assert len(lines) == 1 + 81 * 5 * 6


def test_scan_csv_fit_writes_sibling_file(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, _ = run(
        ["scan", "--qs", "3,5,7,11,13", "--grid", "3", "--families", "delta",
         "--fit", "--out", str(out)],
        capsys,
    )
    assert code == 0
    fits = json.loads((tmp_path / "scan.csv.fits.json").read_text())
    assert fits["fits"] and fits["seed"] == 0


def test_scan_json_with_fit(tmp_path, capsys):
    out = tmp_path / "scan.json"
    code, _, _ = run(
        ["scan", "--qs", "3,5,7,11,13", "--grid", "3", "--families", "delta",
         "--fit", "--format", "json", "--out", str(out)],
        capsys,
    )
    assert code == 0
    body = json.loads(out.read_text())
    assert body["fits"]
    fit = next(f for f in body["fits"] if f["x"] == 0.5 and f["y"] == 1.0)
    assert fit["predicted"] == 1.0


def test_scan_fit_needs_enough_qs(capsys):
    code, _, err = run(["scan", "--qs", "3,5", "--grid", "3", "--fit"], capsys)
    assert code == 2
    assert "4" in err


def test_scan_bad_grid(capsys):
    code, _, _ = run(["scan", "--qs", "3", "--grid", "1"], capsys)
    assert code == 2


# -- norm --------------------------------------------------------------------------


def test_norm_delta_file(tmp_path, capsys):
    spec = get_field(3)
    g = GridFunction.delta(spec, 2, 3)
    path = tmp_path / "delta.json"
    path.write_text(json.dumps(g.to_dict()))
    code, out, _ = run(["norm", str(path), "--p", "1", "--s", "2"], capsys)
    assert code == 0
    ratio = float(out.splitlines()[2].split(":")[1])
    assert ratio == pytest.approx(math.sqrt(2 / 3), rel=1e-9)


def test_norm_radial_file_uses_fast_path(tmp_path, capsys):
    spec = get_field(5)
    rng = np.random.default_rng(1)
    rf = RadialFunction(spec, 2, rng.standard_normal(5))
    path = tmp_path / "radial.json"
    path.write_text(json.dumps(rf.to_dict()))
    code, out, _ = run(["norm", str(path), "--p", "1", "--s", "3/2"], capsys)
    assert code == 0
    assert "radial_fast_path: true" in out


def test_norm_zero_function_exit_2(tmp_path, capsys):
    spec = get_field(3)
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(GridFunction.zero(spec, 2).to_dict()))
    code, _, err = run(["norm", str(path)], capsys)
    assert code == 2
    assert "zero" in err


def test_norm_malformed_file_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, _ = run(["norm", str(path)], capsys)
    assert code == 2
    path2 = tmp_path / "short.json"
    spec = get_field(3)
    d = GridFunction.delta(spec, 2, 0).to_dict()
    d["values"] = d["values"][:-1]
    path2.write_text(json.dumps(d))
    code2, _, _ = run(["norm", str(path2)], capsys)
    assert code2 == 2


def test_norm_bad_exponent_exit_2(tmp_path, capsys):
    spec = get_field(3)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(GridFunction.delta(spec, 2, 1).to_dict()))
    code, _, _ = run(["norm", str(path), "--p", "zero"], capsys)
    assert code == 2


# -- region -------------------------------------------------------------------------


def test_region_general_json(capsys):
    code, out, _ = run(["region"], capsys)
    assert code == 0
    body = json.loads(out)
    assert body["vertices"] == [["0", "0"], ["1", "0"], ["1", "1/2"], ["1/2", "1/2"]]


def test_region_radial_json(capsys):
    code, out, _ = run(["region", "--kind", "radial", "--d", "3"], capsys)
    assert code == 0
    assert ["1", "3/4"] in json.loads(out)["vertices"]


# -- distance -----------------------------------------------------------------------


def test_distance_report(capsys):
    code, out, _ = run(
        ["distance", "--q", "11", "--d", "2", "--size", "80", "--trials", "3"], capsys
    )
    assert code == 0
    body = json.loads(out)
    assert body["all_full"] is True


def test_distance_oversized_exit_2(capsys):
    code, _, _ = run(["distance", "--q", "11", "--d", "2", "--size", "122"], capsys)
    assert code == 2


# -- custom field overrides -------------------------------------------------------------


def test_verify_with_custom_modulus(capsys):
    # t^2 + t + 2 is irreducible over F_3; the exact identities hold for any
    # admissible modulus (equivalently, any nontrivial character choice)
    code, out, _ = run(
        ["verify", "--suite", "l2identity", "--q", "9", "--d", "2",
         "--modulus", "2,1,1", "--alpha", "2"],
        capsys,
    )
    assert code == 0
    assert "[PASS]" in out


def test_verify_with_reducible_modulus_exit_2(capsys):
    code, _, err = run(
        ["verify", "--suite", "l2identity", "--q", "9", "--modulus", "2,0,1"], capsys
    )
    assert code == 2
    assert "reducible" in err


def test_modulus_override_needs_single_q(capsys):
    code, _, _ = run(
        ["verify", "--suite", "l2identity", "--q", "9,25", "--modulus", "2,1,1"], capsys
    )
    assert code == 2


def test_alpha_mismatch_exit_2(capsys):
    code, _, _ = run(["verify", "--suite", "l2identity", "--q", "9", "--alpha", "3"], capsys)
    assert code == 2


# -- argparse behaviour ----------------------------------------------------------------


def test_unknown_command_exit_2(capsys):
    assert main(["frobnicate"]) == 2


def test_missing_required_flag_exit_2(capsys):
    assert main(["distance", "--q", "11"]) == 2
