import json
import math

import pytest

from clusterkit.cli import main, run_for_test


def run_json(argv):
    return json.loads(run_for_test(argv))


def strip_timestamp(text):
    return "\n".join(l for l in text.splitlines() if '"generated_at"' not in l)


def test_radii_u1():
    out = run_json(["radii", "--u", "1.0"])
    assert out["schema"] == 1
    assert out["kind"] == "radius_report"
    assert abs(out["F"] - 0.1448) < 5e-4
    assert out["a_discrepancy_flagged"] is True
    assert abs(out["g"] - out["F"]) < 1e-10


def test_radii_from_potential():
    out = run_json(["radii", "--potential", "hard_rod", "--sigma", "1", "--beta", "1"])
    assert abs(out["rho_star"] - 0.0723835) < 1e-6
    assert abs(out["mayer_radius"] - 1.0 / (2.0 * math.e)) < 1e-12


def test_radii_table_format(capsys):
    assert main(["radii", "--u", "1.0", "--format", "table"]) == 0
    text = capsys.readouterr().out
    assert "discrepancy flagged" in text
    assert "density radius" in text


def test_mayer_b4():
    out = run_json(["mayer", "--potential", "hard_rod", "--sigma", "1",
                    "--beta", "1", "--n", "4"])
    rec = [r for r in out["records"] if r["n"] == 4][0]
    assert abs(rec["value"] - (-8.0 / 3.0)) < 1e-4
    assert rec["quantity"] == "b_n"
    assert rec["method"] == "quadrature"
    assert abs(out["cbeta"] - 2.0) < 1e-10


def test_mayer_csv_has_header():
    text = run_for_test(["mayer", "--potential", "hard_rod", "--sigma", "1",
                         "--n", "3", "--format", "csv"])
    lines = text.strip().splitlines()
    assert lines[0] == "quantity,n,beta,value,error,penrose_bound"
    assert len(lines) == 4


def test_virial_routes_agree():
    out = run_json(["virial", "--potential", "hard_rod", "--sigma", "1",
                    "--k-max", "3"])
    for rec in out["records"]:
        k = rec["k"]
        assert abs(rec["transform"] - rec["inversion"]) < 1e-9
        assert abs(rec["transform"] - (-(k + 1) / k)) < 1e-6
        assert abs(rec["direct"] - (-(k + 1) / k)) < 1e-6


def test_polymer_xi():
    out = run_json(["polymer", "xi", "--n-ground", "4", "--zeta", "2=1/3,3=-1/4,4=2/7"])
    assert out["xi"]["rational"] == out["xi_bruteforce"]["rational"]


def test_polymer_pexact():
    out = run_json(["polymer", "pexact", "--n-ground", "4", "--s", "2,2"])
    assert out["value"]["rational"] == "15/32"
    assert out["limit"]["rational"] == "1/1"
    assert out["limit"]["value"] == 1.0


def test_polymer_fpcheck():
    out = run_json(["polymer", "fpcheck", "--n-ground", "12",
                    "--potential", "hard_rod", "--sigma", "1",
                    "--rho", "0.05", "--a", "0.4623"])
    assert out["holds"] is True
    out = run_json(["polymer", "fpcheck", "--n-ground", "12",
                    "--potential", "hard_rod", "--sigma", "1",
                    "--rho", "0.5", "--a", "0.4623"])
    assert out["holds"] is False


def test_polymer_ckn():
    out = run_json(["polymer", "ckn", "--n-ground", "8",
                    "--potential", "hard_rod", "--k", "1"])
    assert out["value"]["rational"] == "-7/4"  # 2 b_2 (1 - 1/8)
    assert abs(out["limit"] + 2.0) < 1e-12


def test_canonical_report():
    out = run_json(["canonical", "--potential", "hard_rod", "--sigma", "1",
                    "--L", "2000", "--N", "100", "--k-max", "6"])
    assert out["pass"] is True
    assert out["rho"] == pytest.approx(0.05)


def test_verify_subcommand_exit_codes(capsys):
    assert main(["verify", "--suite", "graphs", "--nmax", "4"]) == 0
    text = capsys.readouterr().out
    assert "PASS graphs.cayley_counts" in text


def test_determinism_modulo_timestamp():
    argv = ["mayer", "--potential", "hard_sphere", "--sigma", "1",
            "--dimension", "3", "--beta", "1", "--n", "3",
            "--method", "monte_carlo", "--seed", "5", "--samples", "40000"]
    a = strip_timestamp(run_for_test(argv))
    b = strip_timestamp(run_for_test(argv))
    assert a == b


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["mayer", "--potential", "hard_rod", "--frobnicate", "1"])
    assert exc.value.code == 2


def test_mc_without_seed_exits_2(capsys):
    code = main(["mayer", "--potential", "hard_rod", "--sigma", "1",
                 "--method", "monte_carlo"])
    assert code == 2
    assert "seed" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "potential": {"kind": "hard_rod", "sigma": 1.0},
        "mayer": {"n": 3, "beta": 1.0},
    }))
    assert main(["--config", str(cfg), "mayer"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["records"]) == 3
    assert out["records"][0]["potential"]["kind"] == "hard_rod"


def test_config_flag_overrides_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "potential": {"kind": "hard_rod", "sigma": 1.0},
        "mayer": {"n": 3},
    }))
    assert main(["--config", str(cfg), "mayer", "--n", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["records"]) == 2


def test_config_unknown_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"mayer": {"banana": 1}}))
    code = main(["--config", str(cfg), "mayer", "--potential", "hard_rod"])
    assert code == 2
    assert "banana" in capsys.readouterr().err


def test_config_unknown_section_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"wibble": {}}))
    code = main(["--config", str(cfg), "mayer", "--potential", "hard_rod"])
    assert code == 2
    assert "wibble" in capsys.readouterr().err


def test_out_file(tmp_path):
    target = tmp_path / "report.json"
    run_for_test(["radii", "--u", "2.0", "--out", str(target)])
    data = json.loads(target.read_text())
    assert data["kind"] == "radius_report"
    assert data["u"] == 2.0


def test_out_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("CLUSTERKIT_OUT", str(tmp_path))
    run_for_test(["radii", "--u", "1.5", "--out", "r.json"])
    data = json.loads((tmp_path / "r.json").read_text())
    assert data["u"] == 1.5


def test_virial_csv_long_format():
    text = run_for_test(["virial", "--potential", "hard_rod", "--sigma", "1",
                         "--k-max", "2", "--format", "csv"])
    lines = text.strip().splitlines()
    assert lines[0] == "k,C_k,source,error"
    sources = {line.split(",")[2] for line in lines[1:]}
    assert {"mayer_transform", "inversion_oracle",
            "direct_integral", "closed_form"} <= sources
