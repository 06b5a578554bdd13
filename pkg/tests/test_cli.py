"""End-to-end tests of the command-line surface."""

import csv
import json

import pytest

from levdiv.cli import PUBLISHED_CRITICAL_N, compute_table1, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestScalarCommands:
    def test_pd_pretty(self, capsys):
        code, out, _ = run(capsys, "pd", "--f", "0.25", "--n", "5", "--N", "10", "--chi", "1.6")
        assert code == 0
        assert "0.09128757073457716" in out

    def test_pd_json(self, capsys):
        code, out, _ = run(
            capsys, "pd", "--f", "0.25", "--n", "5", "--N", "10", "--chi", "1.6",
            "--output", "json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["pd"] == pytest.approx(0.0912875707, abs=1e-9)

    def test_pd_csv_is_crlf(self, capsys):
        code, out, _ = run(
            capsys, "pd", "--f", "0.25", "--n", "5", "--N", "10", "--chi", "1.6",
            "--output", "csv",
        )
        assert code == 0
        assert "\r\n" in out
        rows = list(csv.reader(out.splitlines()))
        assert rows[0][-1] == "pd"

    def test_sigma_route(self, capsys):
        code, out, _ = run(
            capsys, "pd", "--f", "0.25", "--n", "5", "--N", "10",
            "--sigma", "1.7888543819998317", "--T", "1.0", "--output", "json",
        )
        assert code == 0
        assert json.loads(out)["pd"] == pytest.approx(0.0912875707, abs=1e-8)

    def test_spd_and_delta(self, capsys):
        code, out, _ = run(
            capsys, "spd", "--f", "0.25", "--n", "5", "--N", "10", "--chi", "1.6",
            "--output", "json",
        )
        assert code == 0
        assert 0 < json.loads(out)["systemic_pd"] < 0.0913
        code, out, _ = run(
            capsys, "delta", "--f-normal", "0.1", "--f-abnormal", "0.25",
            "--n", "3", "--N", "10", "--chi", "1.6", "--output", "json",
        )
        assert code == 0
        assert json.loads(out)["delta_phi2"] == pytest.approx(0.06286104646, abs=1e-8)

    def test_critical_n_reports_none_in_band(self, capsys):
        code, out, _ = run(
            capsys, "critical-n", "--f-normal", "0.25", "--f-abnormal", "0.5",
            "--N", "10", "--chi", "9.0",
        )
        assert code == 0
        assert "none" in out

    def test_mu_scan(self, capsys):
        code, out, _ = run(
            capsys, "mu-scan", "--f-normal", "0.1", "--f-abnormal", "0.25",
            "--N", "10", "--chi", "0.4", "--mu-values=-0.2,0,0.2", "--output", "json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["critical_n[mu=0.0]"] == "9"
        assert doc["critical_n[mu=-0.2]"] == "none"

    def test_grid_method_flag(self, capsys):
        code, out, _ = run(
            capsys, "spd", "--f", "0.25", "--n", "5", "--N", "10", "--chi", "1.6",
            "--method", "grid", "--grid-cells", "400", "--output", "json",
        )
        assert code == 0
        assert json.loads(out)["systemic_pd"] == pytest.approx(0.0284762758, abs=1e-3)

    def test_grid_range_override(self, capsys):
        code, out, _ = run(
            capsys, "spd", "--f", "0.25", "--n", "5", "--N", "10", "--chi", "1.6",
            "--method", "grid", "--grid-cells", "400", "--grid-range=-6:6",
            "--output", "json",
        )
        assert code == 0
        assert json.loads(out)["systemic_pd"] == pytest.approx(0.0284762758, abs=1e-3)
        code, _, err = run(
            capsys, "spd", "--f", "0.25", "--n", "5", "--N", "10", "--chi", "1.6",
            "--method", "grid", "--grid-range", "junk",
        )
        assert code == 2
        assert "grid-range" in err


class TestErrors:
    def test_domain_error_exits_2(self, capsys):
        code, _, err = run(capsys, "pd", "--f", "1.5", "--n", "5", "--N", "10", "--chi", "1.6")
        assert code == 2
        assert "error" in err

    def test_missing_market_exits_2(self, capsys):
        code, _, err = run(capsys, "pd", "--f", "0.5", "--n", "5", "--N", "10")
        assert code == 2
        assert "chi" in err or "sigma" in err

    def test_both_chi_and_sigma_exits_2(self, capsys):
        code, _, _ = run(
            capsys, "pd", "--f", "0.5", "--n", "5", "--N", "10",
            "--chi", "1.6", "--sigma", "0.5",
        )
        assert code == 2

    def test_usage_error_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["pd", "--f", "not-a-number", "--n", "5", "--N", "10", "--chi", "1.6"])
        assert exc.value.code == 2

    def test_unwritable_out_nonzero(self, capsys):
        code, _, err = run(
            capsys, "sweep", "--f-normal", "0.1", "--f-abnormal", "0.25",
            "--N-values", "4", "--chi-points", "2", "--out", "/nonexistent/dir/x.csv",
        )
        assert code != 0
        assert "error" in err


class TestConfigPrecedence:
    def test_flags_beat_config_beat_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"f": 0.25, "n": 5, "N": 10, "chi": 1.6}))
        code, out, _ = run(capsys, "pd", "--config", str(cfg), "--output", "json")
        assert code == 0
        assert json.loads(out)["f"] == 0.25
        code, out, _ = run(
            capsys, "pd", "--config", str(cfg), "--f", "0.5", "--output", "json"
        )
        assert code == 0
        assert json.loads(out)["f"] == 0.5


class TestSweepCommand:
    def test_csv_row_count_and_summary(self, capsys, tmp_path):
        out_path = tmp_path / "sweep.csv"
        code, out, _ = run(
            capsys, "sweep", "--f-normal", "0.1", "--f-abnormal", "0.25",
            "--N-values", "4,6", "--chi-points", "10", "--out", str(out_path),
        )
        assert code == 0
        rows = list(csv.reader(out_path.read_text().splitlines()))
        assert len(rows) == 1 + (4 + 6) * 10
        assert "risky fraction" in out

    def test_json_output_parses(self, capsys, tmp_path):
        out_path = tmp_path / "sweep.json"
        code, _, _ = run(
            capsys, "sweep", "--f-normal", "0.1", "--f-abnormal", "0.25",
            "--N-values", "4", "--chi-points", "3", "--output", "json",
            "--out", str(out_path),
        )
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert set(doc["markets"]) == {"4"}

    def test_byte_identical_reruns(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run(
                capsys, "sweep", "--f-normal", "0.1", "--f-abnormal", "0.25",
                "--N-values", "5", "--chi-points", "8", "--out", str(path),
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()


class TestTable1Command:
    def test_layout_and_reference_cells(self, capsys, tmp_path):
        out_path = tmp_path / "table1.csv"
        code, out, _ = run(capsys, "table1", "--out", str(out_path))
        assert code == 0
        body = [line for line in out.splitlines() if line.startswith("{")]
        assert len(body) == 6  # two scenarios x three chi rows
        rows = list(csv.reader(out_path.read_text().splitlines()))
        # Table 1 layout: one row per N, a value and a diff column per
        # (scenario, chi) pair
        assert rows[0][0] == "N"
        assert len(rows) == 1 + 4
        assert len(rows[0]) == 1 + 6 + 6
        assert rows[0][1] == "fn0.1_fa0.25_chi1.6"
        for row in rows[1:]:
            size = int(row[0])
            for got in row[1:7]:
                assert got == "none" or 1 <= int(got) <= size

    def test_reference_values_match_source_table(self):
        ref = PUBLISHED_CRITICAL_N
        assert ref[(0.10, 0.25)][1.6] == (3, 4, 5, 5)
        assert ref[(0.25, 0.50)][8.9] == (7, 12, 17, 22)

    def test_loose_epsilon_gives_small_levels(self, capsys):
        # with a threshold well above the achievable differentials the whole
        # suffix is safe everywhere
        code, out, _ = run(capsys, "table1", "--eps-safe", "0.99")
        assert code == 0
        computed = compute_table1(epsilon_safe=0.99)
        assert all(v == 1 for by_chi in computed.values() for vs in by_chi.values() for v in vs)


class TestSimulateCommand:
    ARGS = (
        "simulate", "--f", "0.25", "--n", "2", "--N", "4", "--chi", "1.6",
        "--paths", "400", "--steps", "25", "--seed", "7", "--overlap", "fixed:1",
    )

    def test_identical_reruns(self, capsys):
        code1, out1, _ = run(capsys, *self.ARGS, "--output", "json")
        code2, out2, _ = run(capsys, *self.ARGS, "--output", "json")
        assert code1 == code2 == 0
        assert out1 == out2

    def test_comparison_columns(self, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--output", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["target_correlation"] == 0.5
        assert 0 <= doc["pd1_hat"] <= 1
        assert doc["analytic_pd"] == pytest.approx(0.32150071778, abs=1e-8)
        assert doc["pd1_se_multiple"] >= 0

    def test_single_path_determinism(self, capsys):
        args = (
            "simulate", "--f", "0.25", "--n", "2", "--N", "4", "--chi", "1.6",
            "--paths", "1", "--steps", "10", "--seed", "7", "--overlap", "random",
            "--output", "json",
        )
        _, out1, _ = run(capsys, *args)
        _, out2, _ = run(capsys, *args)
        assert out1 == out2

    def test_terminal_dump(self, capsys, tmp_path):
        dump = tmp_path / "terminals.csv"
        code, _, _ = run(capsys, *self.ARGS, "--dump-terminals", str(dump))
        assert code == 0
        rows = list(csv.reader(dump.read_text().splitlines()))
        assert rows[0] == ["path", "terminal_assets_bank1", "terminal_assets_bank2"]
        assert len(rows) == 1 + 400
        assert float(rows[1][1]) > 0
