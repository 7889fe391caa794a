import json

import pytest

from spinspec.cli import main, report_to_json
from spinspec.problemfile import symbol_to_text
from spinspec.floquet import LaurentSymbol


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def shifted_scalar_file(tmp_path):
    path = tmp_path / "z_minus_2.txt"
    path.write_text(symbol_to_text(LaurentSymbol.scalar({0: -2, 1: 1})))
    return str(path)


@pytest.fixture
def shift_file(tmp_path):
    path = tmp_path / "shift.txt"
    path.write_text(symbol_to_text(LaurentSymbol.scalar({1: 1})))
    return str(path)


@pytest.fixture
def root_on_circle_file(tmp_path):
    path = tmp_path / "z_minus_1.txt"
    path.write_text(symbol_to_text(LaurentSymbol.scalar({0: -1, 1: 1})))
    return str(path)


class TestSpectrumCommand:
    def test_circle_csv(self, capsys):
        code, out, _ = run(capsys, "spectrum", "circle", "--spin", "bounding",
                           "--c", "0", "--band", "3", "--format", "csv")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "eigenvalue,multiplicity"
        values = [float(l.split(",")[0]) for l in lines[1:]]
        assert values == [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5]

    def test_sphere_multiplicities(self, capsys):
        doc = run_json(capsys, "spectrum", "sphere", "--l", "2", "--kmax", "1")
        pairs = doc["results"]["pairs"]
        assert pairs == [[-2.0, 4], [-1.0, 2], [1.0, 2], [2.0, 4]]

    def test_half_twist_contains_zero(self, capsys):
        doc = run_json(capsys, "spectrum", "circle", "--spin", "bounding",
                       "--c", "0.5", "--band", "2")
        assert any(abs(lam) < 1e-12 for lam, _ in doc["results"]["pairs"])

    def test_product(self, capsys):
        doc = run_json(capsys, "spectrum", "product", "--spin", "bounding",
                       "--c", "0", "--band", "3", "--l", "2", "--kmax", "2",
                       "--cutoff", "10")
        assert doc["results"]["pairs"][0][0] == pytest.approx(1.25)

    def test_invalid_params_exit_2(self, capsys):
        code, _, _ = run(capsys, "spectrum", "circle", "--band", "0")
        assert code == 2
        code, _, _ = run(capsys, "spectrum", "sphere", "--l", "1")
        assert code == 2


class TestTwistScan:
    def test_bounding(self, capsys):
        doc = run_json(capsys, "twist-scan", "--spin", "bounding",
                       "--steps", "80", "--grid", "16")
        locations = [e["value"] for e in doc["results"]["kernel_twists_mod1"]]
        assert len(locations) == 1
        assert abs(locations[0] - 0.5) < 1e-6
        assert doc["results"]["cover_operator_fredholm"] is False

    def test_nonbounding(self, capsys):
        doc = run_json(capsys, "twist-scan", "--spin", "nonbounding",
                       "--steps", "80", "--grid", "16")
        locations = [e["value"] for e in doc["results"]["kernel_twists_mod1"]]
        assert len(locations) == 1
        assert min(locations[0], 1.0 - locations[0]) < 1e-6

    def test_massive_verdict_fredholm(self, capsys):
        doc = run_json(capsys, "twist-scan", "--spin", "bounding", "--massive",
                       "0.75", "--steps", "40", "--grid", "16")
        assert doc["results"]["kernel_twists_mod1"] == []
        assert doc["results"]["cover_operator_fredholm"] is True


class TestFredholmCommands:
    def test_fredholm_true(self, capsys, shifted_scalar_file):
        doc = run_json(capsys, "fredholm", shifted_scalar_file)
        res = doc["results"]
        assert res["is_fredholm"] is True
        assert res["index"] == 0
        assert res["min_singular"]["value"] == pytest.approx(1.0, abs=1e-7)

    def test_fredholm_false_witness(self, capsys, root_on_circle_file):
        doc = run_json(capsys, "fredholm", root_on_circle_file)
        res = doc["results"]
        assert res["is_fredholm"] is False
        assert abs(res["witness"][0] - 1.0) < 1e-3

    def test_index_of_shift(self, capsys, shift_file):
        doc = run_json(capsys, "index", shift_file)
        assert doc["results"]["index"] == -1

    def test_index_of_non_fredholm_exit_3(self, capsys, root_on_circle_file):
        code, _, err = run(capsys, "index", root_on_circle_file)
        assert code == 3 and "error" in err

    def test_parse_failure_exit_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("[symbol]\nblock-size: 1\nbandwidth: 0\n[coeff 0]\nnope\n")
        code, _, err = run(capsys, "fredholm", str(bad))
        assert code == 2 and "line" in err

    def test_missing_file_exit_2(self, capsys):
        code, _, _ = run(capsys, "fredholm", "/nonexistent/sym.txt")
        assert code == 2

    def test_spectral_flow_loop(self, capsys, tmp_path):
        from spinspec.discretize import Scheme, build_circle_dirac, period_symbol
        from spinspec.spectra import SpinStructure
        sym = period_symbol(build_circle_dirac(16, Scheme.CENTRAL_DIFFERENCE,
                                               SpinStructure.BOUNDING, 0.0))
        path = tmp_path / "circle.txt"
        path.write_text(symbol_to_text(sym))
        doc = run_json(capsys, "spectral-flow", str(path), "--steps", "24")
        res = doc["results"]
        assert res["flow"] == 0  # a closed symbol loop nets to zero
        locations = sorted(c["parameter"]["value"] for c in res["crossings"])
        assert any(abs(c - 0.5) < 1e-6 for c in locations)


class TestInvariantCommand:
    def test_beta_worked_values(self, capsys):
        doc = run_json(capsys, "invariant", "beta", "--rho", "1", "--sig-v", "-16")
        assert doc["results"]["residue_mod2"] == "0"
        doc = run_json(capsys, "invariant", "beta", "--rho", "0", "--sig-v", "-16")
        assert doc["results"]["residue_mod2"] == "1"

    def test_alpha(self, capsys):
        doc = run_json(capsys, "invariant", "alpha", "--n", "4", "--sign", "-16")
        assert doc["results"]["value"] == "1"

    def test_rohlin_and_lifts(self, capsys):
        doc = run_json(capsys, "invariant", "rohlin", "--sig-w", "8")
        assert doc["results"]["residue_mod2"] == "1"
        doc = run_json(capsys, "invariant", "w", "--ind", "2", "--sig-w", "0")
        assert doc["results"] == {"value": "2", "residue_mod2": "0"}
        doc = run_json(capsys, "invariant", "wcs", "--ind", "0", "--sig-w", "8",
                       "--sig-v", "-16")
        assert doc["results"] == {"value": "2", "residue_mod2": "0"}

    def test_outputs_are_strings_not_floats(self, capsys):
        doc = run_json(capsys, "invariant", "beta", "--rho", "1/2", "--sig-v", "8")
        assert isinstance(doc["results"]["value"], str)
        assert doc["results"]["value"] == "0"

    def test_divisibility_violation_exit_3(self, capsys):
        code, _, _ = run(capsys, "invariant", "alpha", "--n", "4", "--sign", "-15")
        assert code == 3
        code, _, _ = run(capsys, "invariant", "rohlin", "--sig-w", "4", "--strict")
        assert code == 3


class TestFormsCommand:
    def test_show_k3(self, capsys):
        doc = run_json(capsys, "forms", "show", "K3")
        assert doc["results"]["rank"] == 22
        assert doc["results"]["signature"] == -16

    def test_show_h(self, capsys):
        doc = run_json(capsys, "forms", "show", "H")
        assert doc["results"]["signature"] == 0

    def test_sum(self, capsys):
        doc = run_json(capsys, "forms", "sum", "-E8+E8+3H")
        assert doc["results"]["rank"] == 22
        assert doc["results"]["signature"] == 0

    def test_list(self, capsys):
        doc = run_json(capsys, "forms", "list")
        assert "E8" in doc["results"]["names"]

    def test_unknown_name_exit_2(self, capsys):
        code, _, _ = run(capsys, "forms", "show", "E9")
        assert code == 2


class TestReportDocument:
    def test_schema_and_convention(self, capsys, shifted_scalar_file):
        doc = run_json(capsys, "fredholm", shifted_scalar_file)
        assert doc["schema"] == "spinspec.report/1"
        assert doc["convention"]["clifford_sign"] == -1
        assert "tolerances" in doc and "timing_s" in doc

    def test_json_round_trip_byte_identical(self, capsys, shifted_scalar_file):
        code, out, _ = run(capsys, "fredholm", shifted_scalar_file)
        assert code == 0
        text = out[:-1]  # strip the trailing newline
        assert report_to_json(json.loads(text)) == text

    def test_results_deterministic(self, capsys):
        doc1 = run_json(capsys, "spectrum", "circle", "--c", "0.3", "--band", "5")
        doc2 = run_json(capsys, "spectrum", "circle", "--c", "0.3", "--band", "5")
        assert doc1["results"] == doc2["results"]

    def test_convention_flag(self, capsys):
        code, out, _ = run(capsys, "--convention")
        assert code == 0
        block = json.loads(out)
        assert block["index_convention"].startswith("half-line")

    def test_no_command_exit_2(self, capsys):
        code, _, _ = run(capsys)
        assert code == 2

    def test_env_tolerance_override(self, capsys, monkeypatch, root_on_circle_file):
        monkeypatch.setenv("SPECTRAL_TOL", "1e-3")
        doc = run_json(capsys, "fredholm", root_on_circle_file)
        assert doc["tolerances"]["fredholm_tol"] == 1e-3
        monkeypatch.setenv("SPECTRAL_TOL", "bogus")
        code, _, _ = run(capsys, "fredholm", root_on_circle_file)
        assert code == 3
