import json
import math

import pytest

from qkbounds.cli import format_float, parse_grid, run, to_json


@pytest.fixture
def two_level_instance(tmp_path):
    path = tmp_path / "two_level.json"
    path.write_text(
        json.dumps(
            {
                "system": {"thermal": {"energies": [0.5, -0.5], "lambda": 1.0}},
                "controller": {"spectrum": [1.0]},
                "observable": "sigma_z",
            }
        )
    )
    return str(path)


@pytest.fixture
def overlap_instance(tmp_path):
    path = tmp_path / "overlap.json"
    path.write_text(
        json.dumps(
            {
                "system": {"spectrum": [0.4, 0.6]},
                "controller": {"spectrum": [0.1, 0.9]},
                "observable": {"distinct": [-1, 1], "multiplicities": [1, 1]},
            }
        )
    )
    return str(path)


class TestSerialization:
    def test_float_formatting(self):
        assert format_float(0.4621171572600098) == "0.46211715726"
        assert format_float(math.inf) == '"inf"'
        assert format_float(-math.inf) == '"-inf"'

    def test_round_trip(self):
        payload = {"a": 0.123456789012345, "b": [1, 2.5], "c": None, "d": True, "e": "x"}
        parsed = json.loads(to_json(payload))
        assert parsed["a"] == pytest.approx(payload["a"], rel=1e-11)
        assert parsed["b"] == [1, 2.5]
        assert parsed["c"] is None and parsed["d"] is True and parsed["e"] == "x"

    def test_grid_parsing(self):
        assert parse_grid("0:1:3") == [0.0, 0.5, 1.0]
        assert parse_grid("2:5:1") == [2.0]


class TestBoundsCommand:
    def test_two_level_value(self, two_level_instance, capsys):
        assert run(["bounds", "--instance", two_level_instance]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["ckb_max"] == pytest.approx(math.tanh(0.5), abs=1e-9)
        assert report["kin_max"] == pytest.approx(math.tanh(0.5), abs=1e-9)
        assert report["qkb_max"] == 1
        assert report["surpass_upper"] is False

    def test_overlap_predicates(self, overlap_instance, capsys):
        assert run(["bounds", "--instance", overlap_instance]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["kin_max"] == pytest.approx(0.8, abs=1e-12)
        assert report["surpass_upper"] is True
        assert report["witness_upper"] == 1

    def test_byte_determinism(self, overlap_instance, capsys):
        run(["bounds", "--instance", overlap_instance])
        first = capsys.readouterr().out
        run(["bounds", "--instance", overlap_instance])
        second = capsys.readouterr().out
        assert first == second

    def test_report_reparses_to_identical_values(self, overlap_instance, capsys):
        run(["bounds", "--instance", overlap_instance])
        text = capsys.readouterr().out
        a = json.loads(text)
        b = json.loads(to_json(json.loads(text)) + "\n")
        assert a == b

    def test_invalid_spectrum_names_invariant(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.5, 0.6]},
                    "controller": {"spectrum": [1.0]},
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["bounds", "--instance", str(path)]) == 2
        err = capsys.readouterr().err
        assert "NotNormalized" in err

    def test_missing_file(self, capsys):
        assert run(["bounds", "--instance", "/nonexistent/x.json"]) == 2
        assert "cannot read instance file" in capsys.readouterr().err

    def test_negative_eigenvalue_diagnostic(self, tmp_path, capsys):
        path = tmp_path / "neg.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [-0.2, 1.2]},
                    "controller": {"spectrum": [1.0]},
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["bounds", "--instance", str(path)]) == 2
        assert "NegativeEigenvalue" in capsys.readouterr().err

    def test_out_file(self, overlap_instance, tmp_path, capsys):
        out = tmp_path / "report.json"
        assert run(["bounds", "--instance", overlap_instance, "--out", str(out)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text())["kin_max"] == pytest.approx(0.8, abs=1e-12)

    def test_infinite_bandwidth_serializes_as_string(self, tmp_path, capsys):
        path = tmp_path / "rank_deficient.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.4, 0.6]},
                    "controller": {"spectrum": [0.0, 1.0]},
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["bounds", "--instance", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["band_structure"]["bandwidth"] == "inf"


class TestTopologyCommand:
    def test_table_report(self, overlap_instance, capsys):
        assert run(["topology", "--instance", overlap_instance]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["n_critical"] == 6
        assert report["source"] == "table"
        assert report["case_label"] == ["MixedNondegenerate", "MixedNondegenerate"]

    def test_degenerate_class_rejected(self, tmp_path, capsys):
        path = tmp_path / "deg.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.25, 0.25, 0.5]},
                    "controller": {"spectrum": [0.3, 0.7]},
                    "observable": {"distinct": [0, 1], "multiplicities": [2, 1]},
                }
            )
        )
        assert run(["topology", "--instance", str(path)]) == 2
        assert "UnsupportedClass" in capsys.readouterr().err


class TestThermalCheckCommand:
    def test_both_forms_agree(self, tmp_path, capsys):
        path = tmp_path / "thermal.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"thermal": {"energies": [0.5, -0.5], "lambda": 1.0}},
                    "controller": {
                        "thermal": {
                            "energies": [-1.0, 0.0, 1.0],
                            "multiplicities": [1, 2, 1],
                            "lambda": 0.8,
                        }
                    },
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["thermal-check", "--instance", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["surpass_upper_frequency_form"] is True
        assert report["surpass_upper_spectral_form"] is True
        assert report["forms_agree"] is True

    def test_requires_thermal_descriptors(self, overlap_instance, capsys):
        assert run(["thermal-check", "--instance", overlap_instance]) == 2
        assert "thermal" in capsys.readouterr().err


class TestCurveCommands:
    def test_figure3_csv_shape(self, capsys):
        assert run(["figure3", "--lambda-s", "1", "--M", "2",
                    "--lambda-c-grid", "0:1:11", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "lambda_c,j_max,j_min,ckb_max,gap_to_ckb"
        assert len(lines) == 12

    def test_figure4_threshold_in_csv(self, capsys):
        assert run(["figure4", "--lambda-s", "1", "--M", "10", "--obs", "Pi1",
                    "--lambda-c-grid", "0:0.2:21", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")[1:]
        for line in lines:
            lam_c, _, _, _, gap = (float(x) for x in line.split(","))
            if lam_c <= 0.1:
                assert abs(gap) <= 1e-12
            if lam_c >= 0.11:
                assert gap > 0

    def test_figure_default_grid_length(self, capsys):
        assert run(["figure4", "--obs", "Pi0", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 401

    def test_figure4_json(self, capsys):
        assert run(["figure4", "--obs", "Pi0", "--lambda-c-grid", "0:1:5"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert len(report["points"]) == 5
        assert report["points"][0]["lambda_c"] == 0

    def test_bad_grid(self, capsys):
        assert run(["figure3", "--lambda-c-grid", "nope"]) == 2
        assert "grid" in capsys.readouterr().err

    def test_bad_observable_choice(self, capsys):
        assert run(["figure4", "--obs", "Pi7"]) == 2


class TestVerifyCommand:
    def test_certificate_for_overlap(self, overlap_instance, capsys):
        assert run(["verify", "--instance", overlap_instance,
                    "--restarts", "6", "--seed", "3"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["certificate"] is True
        assert report["attained_max"] == pytest.approx(0.8, abs=1e-6)
        assert report["violation"] is False

    def test_trace_output(self, overlap_instance, tmp_path, capsys):
        prefix = str(tmp_path / "trace")
        assert run(["verify", "--instance", overlap_instance,
                    "--restarts", "1", "--trace-out", prefix]) == 0
        capsys.readouterr()
        files = sorted(tmp_path.glob("trace_run*.csv"))
        # ascent and descent for identity, reversal, and one Haar restart
        assert len(files) == 6
        header = files[0].read_text().split("\n")[0]
        assert header == "iter,yield,grad_norm"


class TestOracleCommand:
    def test_all_checks_pass(self, overlap_instance, capsys):
        assert run(["oracle", "--instance", overlap_instance]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["all_pass"] is True
        names = {c["name"] for c in report["checks"]}
        assert "surpass_predicate_matches_bruteforce" in names
        assert "reach_predicate_matches_bruteforce" in names
        table = next(c for c in report["checks"] if c["name"] == "table_count")
        assert table["bruteforce_count"] == 6
        assert table["pass"] is True

    def test_with_verifier(self, overlap_instance, capsys):
        assert run(["oracle", "--instance", overlap_instance,
                    "--with-verifier", "--restarts", "4"]) == 0
        report = json.loads(capsys.readouterr().out)
        cert = next(c for c in report["checks"] if c["name"] == "verifier_certificate")
        assert cert["pass"] is True

    def test_too_large(self, tmp_path, capsys):
        path = tmp_path / "big.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.1, 0.2, 0.3, 0.4]},
                    "controller": {"spectrum": [0.2, 0.3, 0.5]},
                    "observable": {"distinct": [0, 1], "multiplicities": [2, 2]},
                }
            )
        )
        assert run(["oracle", "--instance", str(path)]) == 2
        assert "TooLarge" in capsys.readouterr().err

    def test_pure_pure_instance_counts_distinct_eigenvalues(self, tmp_path, capsys):
        path = tmp_path / "pure_pure.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.0, 1.0]},
                    "controller": {"spectrum": [0.0, 1.0]},
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["oracle", "--instance", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        table = next(c for c in report["checks"] if c["name"] == "table_count")
        assert table["status"] == "checked"
        assert table["bruteforce_count"] == table["table_count"] == 2
        assert report["all_pass"] is True

    def test_disputed_table_row_reported_not_asserted(self, tmp_path, capsys):
        path = tmp_path / "pure_mm.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.0, 1.0]},
                    "controller": {"spectrum": [1 / 3, 1 / 3, 1 / 3]},
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["oracle", "--instance", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        table = next(c for c in report["checks"] if c["name"] == "table_count")
        assert table["status"] == "reported"
        assert table["bruteforce_count"] == 4
        assert table["table_count"] == 12
        assert report["all_pass"] is True  # disputed row never asserted


class TestInstanceParsing:
    def test_unknown_preset(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.4, 0.6]},
                    "controller": {"spectrum": [1.0]},
                    "observable": "sigma_q",
                }
            )
        )
        assert run(["bounds", "--instance", str(path)]) == 2
        assert "preset" in capsys.readouterr().err

    def test_both_spectrum_and_thermal_rejected(self, tmp_path, capsys):
        path = tmp_path / "p.json"
        path.write_text(
            json.dumps(
                {
                    "system": {
                        "spectrum": [0.4, 0.6],
                        "thermal": {"energies": [0.5, -0.5], "lambda": 1.0},
                    },
                    "controller": {"spectrum": [1.0]},
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["bounds", "--instance", str(path)]) == 2

    def test_zero_temperature_thermal_instance(self, tmp_path, capsys):
        path = tmp_path / "zero_t.json"
        path.write_text(
            json.dumps(
                {
                    "system": {"spectrum": [0.3, 0.7]},
                    "controller": {"thermal": {"energies": [0.5, -0.5], "lambda": "inf"}},
                    "observable": "sigma_z",
                }
            )
        )
        assert run(["bounds", "--instance", str(path)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["reach_upper"] is True
        assert report["kin_max"] == pytest.approx(1.0, abs=1e-12)
