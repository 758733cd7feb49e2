"""End-to-end tests of the command-line front end: rendering against
published designs, exit-code discipline, overrides, and artifact
round-trips."""

import json
import pathlib

import pytest

from osmon.artifacts import guideline_payload
from osmon.cli import main
from osmon.document import resolve_document

TABLE3 = {
    "version": "1",
    "delta_null": 1.3,
    "delta_alt": 0.8,
    "gamma_fa": 0.025,
    "beta_pa": 0.10,
    "k": 1.0,
    "milestones": [
        {"deaths": 60},
        {"deaths": 89},
        {"deaths": 110},
        {"deaths": 131},
        {"deaths": 178, "final": True},
    ],
    "probe_hrs": [0.8],
}

TABLE4 = {
    "version": "1",
    "delta_null": 1.3,
    "delta_alt": 0.7,
    "gamma_fa": 0.10,
    "beta_pa": 0.10,
    "k": 1.0,
    "milestones": [{"deaths": 28}, {"deaths": 42}, {"deaths": 70, "final": True}],
    "probe_hrs": [0.7, 0.95],
}

TABLE6 = {
    "version": "1",
    "delta_null": 1.333,
    "delta_alt": 0.7,
    "gamma_fa": 0.20,
    "beta_pa": 0.10,
    "k": 1.0,
    "milestones": [{"deaths": 22}, {"deaths": 34, "final": True}],
    "probe_hrs": [0.7, 0.95],
}

SCENARIO = {
    "n_patients": 120,
    "accrual_months": 12.0,
    "control_median_os_months": 30.0,
    "true_os_hr": 0.7,
    "annual_dropout_prob": 0.02,
}


def write_doc(tmp_path, obj, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestDesign:
    def test_add_on_design_csv_rows_byte_exact(self, tmp_path, capsys):
        code, out, _ = run(
            ["design", write_doc(tmp_path, TABLE6), "--format", "csv"], capsys
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[1] == "22,1.209,0.409,18%,0.900,0.714"
        assert lines[2] == "34,0.999,0.200,60%,0.850,0.558"

    def test_platform_design_markdown_final_threshold(self, tmp_path, capsys):
        code, out, _ = run(["design", write_doc(tmp_path, TABLE3)], capsys)
        assert code == 0
        final = out.strip().split("\n")[-1]
        assert final.startswith("| 178 | 0.969 |")

    def test_single_final_milestone_renders_one_row(self, tmp_path, capsys):
        doc = dict(TABLE3, milestones=[{"deaths": 178, "final": True}])
        code, out, _ = run(["design", write_doc(tmp_path, doc), "--format", "csv"], capsys)
        assert code == 0
        assert len(out.strip().split("\n")) == 2

    def test_out_flag_writes_identical_content(self, tmp_path, capsys):
        doc = write_doc(tmp_path, TABLE6)
        _, stdout_content, _ = run(["design", doc, "--format", "csv"], capsys)
        target = tmp_path / "artifact.csv"
        code, out, _ = run(
            ["design", doc, "--format", "csv", "--out", str(target)], capsys
        )
        assert code == 0
        assert out == ""
        assert target.read_text() == stdout_content

    def test_json_artifact_reingests_to_identical_renderings(self, tmp_path, capsys):
        doc = write_doc(tmp_path, TABLE6)
        art = tmp_path / "art.json"
        assert run(["design", doc, "--format", "json", "--out", str(art)], capsys)[0] == 0
        _, csv_direct, _ = run(["design", doc, "--format", "csv"], capsys)
        _, csv_again, _ = run(["design", str(art), "--format", "csv"], capsys)
        assert csv_again == csv_direct
        _, json_again, _ = run(["design", str(art), "--format", "json"], capsys)
        assert json_again == art.read_text()

    def test_probe_defaults_applied_when_absent(self, tmp_path, capsys):
        doc = {k: v for k, v in TABLE4.items() if k != "probe_hrs"}
        code, out, _ = run(
            ["design", write_doc(tmp_path, doc), "--format", "json"], capsys
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["guideline"]["probes"] == [0.7, 0.95, 1.0, 1.3]

    def test_webui_fixture_documents_reingest_to_identical_tables(
        self, tmp_path, capsys
    ):
        # the webui exports the embedded document verbatim, so re-ingesting
        # it here closes the export -> CLI -> same-table loop
        fixture_dir = pathlib.Path(__file__).parent.parent / "frontend/tests/fixtures"
        if not fixture_dir.is_dir():
            pytest.skip("webui fixtures not present")
        for fixture in sorted(fixture_dir.glob("*.json")):
            payload = json.loads(fixture.read_text())
            doc = write_doc(tmp_path, payload["document"], f"re_{fixture.name}")
            code, table, _ = run(["design", doc, "--format", "json"], capsys)
            assert code == 0
            assert json.loads(table)["guideline"] == json.loads(
                json.dumps(guideline_payload(resolve_document(payload["document"])))
            )["guideline"]
            if "guideline" in payload:
                assert json.loads(table)["guideline"] == payload["guideline"]


class TestOC:
    def test_platform_design_final_fp_rate(self, tmp_path, capsys):
        code, out, _ = run(["oc", write_doc(tmp_path, TABLE3), "--format", "csv"], capsys)
        assert code == 0
        assert "fp_final,0.025" in out

    def test_mid_size_design_miss_rate_near_one(self, tmp_path, capsys):
        code, out, _ = run(["oc", write_doc(tmp_path, TABLE4), "--format", "csv"], capsys)
        assert code == 0
        assert "fn_final@0.95,0.488" in out

    def test_alt_probe_miss_rate_equals_design_power_complement(self, tmp_path, capsys):
        code, out, _ = run(["oc", write_doc(tmp_path, TABLE4), "--format", "json"], capsys)
        assert code == 0
        oc = json.loads(out)["oc"]
        assert abs(oc["fn_primary"][0] - TABLE4["beta_pa"]) < 1e-10

    def test_payload_curves_cover_probes_exactly(self, tmp_path, capsys):
        doc = dict(TABLE3, probe_hrs=[0.8, 0.85, 1.3, 1.5])
        code, out, _ = run(["oc", write_doc(tmp_path, doc), "--format", "json"], capsys)
        assert code == 0
        curves = json.loads(out)["oc"]["curves"]
        assert [c["deaths"] for c in curves] == [60, 89, 110, 131, 178]
        by_hr = {h: p for h, p in curves[2]["points"]}
        assert abs(by_hr[0.8] - 0.900) < 1e-3
        assert abs(by_hr[0.85] - 0.832) < 2e-3
        assert abs(by_hr[1.5] - 0.022) < 2e-3
        for c in curves:
            hrs = [h for h, _ in c["points"]]
            assert hrs == sorted(hrs)
            assert len(hrs) >= 151
            assert dict(c["points"])[c["threshold_hr"]] == 0.5


class TestDeaths:
    def test_timeline_starts_at_zero(self, tmp_path, capsys):
        doc = dict(TABLE4, scenario=SCENARIO)
        code, out, _ = run(
            ["deaths", write_doc(tmp_path, doc), "--format", "csv"], capsys
        )
        assert code == 0
        assert out.startswith("months,expected_deaths\n0.0,0.0\n")

    def test_calibrated_scenario_hits_both_planning_pairs(self, tmp_path, capsys):
        doc = dict(
            TABLE6,
            scenario={
                "n_patients": 76,
                "accrual_months": 27.0,
                "control_median_os_months": 68.84,
                "true_os_hr": 0.7,
                "annual_dropout_prob": 0.01,
            },
        )
        code, out, _ = run(
            ["deaths", write_doc(tmp_path, doc), "--format", "json"], capsys
        )
        assert code == 0
        miles = json.loads(out)["milestones"]
        assert miles[0]["deaths"] == 22
        assert abs(miles[0]["calendar_months"] - 55.0) < 1.5
        assert miles[1]["deaths"] == 34
        assert abs(miles[1]["calendar_months"] - 87.0) < 1.5

    def test_unreachable_milestone_flagged_with_domain_exit(self, tmp_path, capsys):
        doc = dict(
            TABLE4,
            scenario=dict(
                SCENARIO, n_patients=50, annual_dropout_prob=0.999, true_os_hr=1.0
            ),
        )
        code, out, _ = run(["deaths", write_doc(tmp_path, doc)], capsys)
        assert code == 3
        assert "unreachable" in out

    def test_missing_scenario_is_input_error(self, tmp_path, capsys):
        code, _, err = run(["deaths", write_doc(tmp_path, TABLE4)], capsys)
        assert code == 2
        assert "scenario" in err


class TestSimulate:
    def sim_doc(self, reps=300, seed=20260824):
        return dict(TABLE4, scenario=SCENARIO, sim={"reps": reps, "seed": seed})

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        doc = write_doc(tmp_path, self.sim_doc())
        code1, out1, _ = run(["simulate", doc, "--format", "json"], capsys)
        code2, out2, _ = run(["simulate", doc, "--format", "json"], capsys)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_small_rep_count_still_reports_flags(self, tmp_path, capsys):
        doc = write_doc(tmp_path, self.sim_doc(reps=100))
        code, out, _ = run(["simulate", doc, "--format", "csv"], capsys)
        assert code == 0
        for line in out.strip().split("\n")[1:]:
            parts = line.split(",")
            assert float(parts[5]) > 0.01
            assert parts[6] in ("pass", "fail")

    def test_flag_overrides_rewrite_sim_block(self, tmp_path, capsys):
        doc = write_doc(tmp_path, self.sim_doc(reps=100, seed=1))
        code, out, _ = run(
            ["simulate", doc, "--format", "json", "--reps", "150", "--seed", "7"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["document"]["sim"] == {"reps": 150, "seed": 7}
        assert payload["simulation"]["reps"] == 150
        assert payload["simulation"]["seed"] == 7

    def test_flags_can_supply_missing_sim_block(self, tmp_path, capsys):
        doc = write_doc(tmp_path, dict(TABLE4, scenario=SCENARIO))
        code, _, _ = run(
            ["simulate", doc, "--reps", "120", "--seed", "3"], capsys
        )
        assert code == 0

    def test_missing_sim_block_is_input_error(self, tmp_path, capsys):
        doc = write_doc(tmp_path, dict(TABLE4, scenario=SCENARIO))
        code, _, err = run(["simulate", doc], capsys)
        assert code == 2
        assert "sim" in err

    def test_too_few_reps_is_domain_error(self, tmp_path, capsys):
        doc = write_doc(tmp_path, self.sim_doc(reps=50))
        code, _, err = run(["simulate", doc], capsys)
        assert code == 3
        assert "replications" in err


class TestExitCodes:
    def test_missing_file(self, capsys):
        code, _, err = run(["design", "/nonexistent/doc.json"], capsys)
        assert code == 2
        assert "cannot read" in err

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(["design", str(path)], capsys)
        assert code == 2
        assert "not valid json" in err

    def test_schema_violation_names_field(self, tmp_path, capsys):
        doc = dict(TABLE4, gamma_fa=0.6)
        code, _, err = run(["design", write_doc(tmp_path, doc)], capsys)
        assert code == 2
        assert "gamma_fa" in err

    def test_unknown_field_rejected(self, tmp_path, capsys):
        doc = dict(TABLE4, gamma=0.1)
        code, _, err = run(["design", write_doc(tmp_path, doc)], capsys)
        assert code == 2
        assert "gamma" in err

    def test_unordered_milestones_rejected(self, tmp_path, capsys):
        doc = dict(TABLE4, milestones=[{"deaths": 70}, {"deaths": 28, "final": True}])
        code, _, err = run(["design", write_doc(tmp_path, doc)], capsys)
        assert code == 2
        assert "milestones" in err

    def test_unknown_command(self, capsys):
        assert run(["frobnicate"], capsys)[0] == 2

    def test_bad_format_value(self, tmp_path, capsys):
        code, _, _ = run(
            ["design", write_doc(tmp_path, TABLE4), "--format", "xml"], capsys
        )
        assert code == 2

    def test_version_flag(self, capsys):
        code, out, _ = run(["--version"], capsys)
        assert code == 0
        assert out.startswith("osmon ")


@pytest.mark.parametrize("dropout", [0.0, 0.1])
def test_dropout_extremes_accepted(tmp_path, capsys, dropout):
    doc = dict(
        TABLE4,
        milestones=[{"deaths": 28, "final": True}],
        scenario=dict(SCENARIO, annual_dropout_prob=dropout),
        sim={"reps": 100, "seed": 5},
    )
    code, out, _ = run(
        ["simulate", write_doc(tmp_path, doc), "--format", "json"], capsys
    )
    assert code == 0
    assert json.loads(out)["simulation"]["reps"] == 100
