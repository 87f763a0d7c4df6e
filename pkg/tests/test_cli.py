import csv
import io
import subprocess
import sys

import pytest

from efimovloss.cli import build_parser, run

CM6 = 1e-12


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(body))


def results(path):
    return {r["parameter"]: r for r in rows(path.read_text())}


def test_spectrum_example():
    code, out, _ = call("spectrum", "--kappa-star", "6.9e-3", "--eta-star", "0.016", "--n-max", "2")
    assert code == 0
    table = rows(out)
    assert [r["n"] for r in table] == ["0", "1", "2"]
    assert float(table[1]["E_over_h_Hz"]) == pytest.approx(55e3, abs=3e3)
    assert list(table[0]) == ["n", "E_over_h_Hz", "a_n_minus_a0", "gamma_rad_per_s", "lifetime_s"]


def test_header_records_configuration():
    _, out, _ = call("spectrum", "--n-max", "1")
    head = [ln for ln in out.splitlines() if ln.startswith("#")]
    assert "# kappa_star_inv_a0 = 0.0069" in head
    assert "# n_max = 1" in head
    assert any(ln.startswith("# hbar = ") for ln in head)


def test_degeneracy_example():
    code, out, _ = call("degeneracy", "--trap", "B", "--B", "1500", "--N", "6e4", "--T", "50e-9")
    assert code == 0
    (r,) = rows(out)
    assert float(r["T_over_T_F"]) == pytest.approx(0.28, abs=0.03)
    assert float(r["T_F_K"]) * 1e9 == pytest.approx(187.5, abs=0.1)


def test_l3_curve(tmp_path):
    code, out, _ = call("l3-curve", "--B-min-gauss", "890", "--B-max-gauss", "900", "--B-step-gauss", "5",
                        "--T-K", "30e-9")
    assert code == 0
    table = rows(out)
    assert [float(r["B_gauss"]) for r in table] == [890.0, 895.0, 900.0]
    for r in table:
        assert float(r["L3_unitarized_cm6_per_s"]) < float(r["L3_zeroT_cm6_per_s"])


def test_scan_resonances():
    code, out, _ = call("scan-resonances")
    (r,) = rows(out)
    assert abs(float(r["B_gauss"]) - 895) < 10 and r["n_branch"] == "1"


def test_simulate_then_fit(tmp_path):
    series = tmp_path / "series.csv"
    result = tmp_path / "fit.csv"
    assert call("simulate", "--L3-cm6-per-s", "2e-21", "--N0-atoms", "1.5e5", "--T0-K", "1.5e-7",
                "-o", str(series))[0] == 0
    code, _, err = call("fit-decay", "--input", str(series), "-o", str(result))
    assert code == 0, err
    r = results(result)
    assert float(r["L3_cm6_per_s"]["value"]) == pytest.approx(2e-21, rel=1e-3)
    assert float(r["N0"]["value"]) == pytest.approx(1.5e5, rel=1e-3)
    assert float(r["T_K"]["value"]) == pytest.approx(1.5e-7, rel=1e-3)
    assert r["converged"]["value"] == "true"
    assert int(r["dof"]["value"]) == 57


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# trap A run\ntrap = A\nB_gauss = 900\nnoise_frac = 0.05\nseed = 7\n")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert call("simulate", "--config", str(cfg), "-o", str(out1))[0] == 0
    assert call("simulate", "--config", str(cfg), "-o", str(out2))[0] == 0
    assert out1.read_bytes() == out2.read_bytes()
    text = out1.read_text()
    assert "# trap = 'A'" in text and "# seed = 7" in text
    # flags beat the config file
    call("simulate", "--config", str(cfg), "--seed", "8", "-o", str(out2))
    assert out1.read_bytes() != out2.read_bytes()


def test_config_constants_override(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("m = 1.9976692827502926e-26\n")  # twice the 6Li mass
    _, base, _ = call("spectrum", "--n-max", "0")
    _, heavy, _ = call("spectrum", "--n-max", "0", "--config", str(cfg))
    e_base = float(rows(base)[0]["E_over_h_Hz"])
    e_heavy = float(rows(heavy)[0]["E_over_h_Hz"])
    assert e_heavy == pytest.approx(e_base / 2, rel=1e-6)


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = call("spectrum", "--config", str(cfg))
    assert code == 3
    assert err.count("\n") == 1 and "colour" in err


def test_fit_efimov_cli(tmp_path):
    curve = tmp_path / "curve.csv"
    assert call("l3-curve", "--B-min-gauss", "880", "--B-max-gauss", "1490", "--B-step-gauss", "10",
                "-o", str(curve))[0] == 0
    pts = tmp_path / "pts.csv"
    with open(pts, "w") as f:
        f.write("B_gauss,L3_cm6_per_s,sigma_L3\n")
        for r in rows(curve.read_text()):
            L3 = float(r["L3_zeroT_cm6_per_s"])
            f.write(f"{r['B_gauss']},{L3!r},{0.1 * L3!r}\n")
    out = tmp_path / "fit.csv"
    code, _, err = call("fit-efimov", "--input", str(pts), "-o", str(out))
    assert code == 0, err
    r = results(out)
    assert float(r["kappa_star_inv_a0"]["value"]) == pytest.approx(6.9e-3, rel=0.01)
    assert float(r["eta_star"]["value"]) == pytest.approx(0.016, rel=0.01)


@pytest.mark.parametrize("argv, code", [
    (["nonsense"], 2),
    (["spectrum", "--bogus"], 2),
    (["spectrum", "--n-max", "x"], 2),
    (["fit-decay", "--input", "/does/not/exist.csv"], 3),
    (["fit-decay"], 3),
    (["degeneracy", "--N", "0.1"], 3),
    (["degeneracy", "--trap", "B", "--B", "500"], 3),
    (["l3-curve", "--B-min-gauss", "100"], 3),
    (["spectrum", "--kappa-star", "-1"], 3),
])
def test_exit_codes(argv, code):
    got, out, err = call(*argv)
    assert got == code
    assert err.count("\n") == 1
    assert out == ""


def test_numerical_failure_exit_code(monkeypatch):
    import efimovloss.cli as cli
    from efimovloss.errors import SingularResonanceError

    def boom(*a, **k):
        raise SingularResonanceError("eta_star = 0 exactly on resonance")

    monkeypatch.setattr(cli, "l3_model_curve", boom)
    code, out, err = call("l3-curve")
    assert code == 4 and out == "" and err.count("\n") == 1


def test_help_lists_units():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        for action in p._actions:
            if action.type in (float, int):
                assert "[" in action.help, (name, action.dest)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "efimovloss", "spectrum", "--n-max", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "E_over_h_Hz" in proc.stdout


def test_byte_identical_outputs(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"s{i}.csv"
        call("simulate", "--noise-frac", "0.05", "--seed", "3", "-o", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
