from __future__ import annotations

import json

import pytest

from mitiplan.catalog import load_catalog
from mitiplan.cli import run


@pytest.fixture()
def fixture_dir(tmp_path):
    assert run(["fixtures", "emit", "--name", "paper_v13", "--out-dir", str(tmp_path)]) == 0
    return tmp_path


def _rank_args(fixture_dir, *extra):
    return [
        "--timestamp",
        "1700000000",
        "rank",
        "--catalog",
        str(fixture_dir / "paper_v13_catalog.json"),
        "--weights",
        str(fixture_dir / "paper_v13_weights.csv"),
        *extra,
    ]


class TestParser:
    def test_version(self, capsys):
        assert run(["--version"]) == 0
        assert capsys.readouterr().out.strip() == "mitiplan 0.1.0"

    def test_unknown_command_is_usage_error(self, capsys):
        assert run(["deorbit"]) == 2

    def test_missing_required_flag_is_usage_error(self, capsys):
        assert run(["rank"]) == 2


class TestFixtures:
    def test_emit_writes_and_lists_files(self, tmp_path, capsys):
        assert (
            run(["fixtures", "emit", "--name", "paper_v13", "--out-dir", str(tmp_path)])
            == 0
        )
        listed = capsys.readouterr().out.splitlines()
        assert len(listed) == 4
        for line in listed:
            assert (tmp_path / line.split("/")[-1]).exists()
        assert (tmp_path / "paper_v13_catalog.json").exists()

    def test_list(self, capsys):
        assert run(["fixtures", "list"]) == 0
        assert "paper_v13" in capsys.readouterr().out.splitlines()


class TestIngest:
    def test_csv_reproduces_bundled_catalog(self, fixture_dir, tmp_path):
        out = tmp_path / "rebuilt.json"
        code = run(
            [
                "ingest",
                "csv",
                "--techniques",
                str(fixture_dir / "paper_v13_techniques.csv"),
                "--mappings",
                str(fixture_dir / "paper_v13_mappings.csv"),
                "--out",
                str(out),
            ]
        )
        assert code == 0
        assert out.read_bytes() == (fixture_dir / "paper_v13_catalog.json").read_bytes()

    def test_csv_to_stdout(self, fixture_dir, capsysbinary):
        code = run(
            [
                "ingest",
                "csv",
                "--techniques",
                str(fixture_dir / "paper_v13_techniques.csv"),
                "--mappings",
                str(fixture_dir / "paper_v13_mappings.csv"),
                "--out",
                "-",
            ]
        )
        assert code == 0
        parsed = json.loads(capsysbinary.readouterr().out)
        assert parsed["schema_version"] == 1
        assert len(parsed["mappings"]) == 46

    def test_bad_mapping_csv_reports_error(self, fixture_dir, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("technique_id,mitigation_id\nT1053,M1026\nT1053,M1026\n")
        code = run(
            [
                "ingest",
                "csv",
                "--techniques",
                str(fixture_dir / "paper_v13_techniques.csv"),
                "--mappings",
                str(bad),
                "--out",
                str(tmp_path / "never.json"),
            ]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_stix_bundle_with_collapse(self, tmp_path):
        bundle = {
            "type": "bundle",
            "id": "bundle--0",
            "objects": [
                {
                    "type": "attack-pattern",
                    "id": "attack-pattern--1",
                    "name": "Phishing",
                    "external_references": [
                        {"source_name": "mitre-attack", "external_id": "T1566"}
                    ],
                },
                {
                    "type": "attack-pattern",
                    "id": "attack-pattern--2",
                    "name": "Spearphishing Attachment",
                    "external_references": [
                        {"source_name": "mitre-attack", "external_id": "T1566.001"}
                    ],
                },
                {
                    "type": "course-of-action",
                    "id": "course-of-action--3",
                    "name": "User Training",
                    "external_references": [
                        {"source_name": "mitre-attack", "external_id": "M1017"}
                    ],
                },
                {
                    "type": "relationship",
                    "id": "relationship--3-2",
                    "relationship_type": "mitigates",
                    "source_ref": "course-of-action--3",
                    "target_ref": "attack-pattern--2",
                },
            ],
        }
        bundle_path = tmp_path / "bundle.json"
        bundle_path.write_text(json.dumps(bundle))

        collapsed_path = tmp_path / "collapsed.json"
        assert (
            run(["ingest", "stix", "--bundle", str(bundle_path), "--out", str(collapsed_path)])
            == 0
        )
        collapsed = load_catalog(collapsed_path)
        assert collapsed.technique_ids() == ("T1566",)
        assert collapsed.mappings == (("M1017", "T1566"),)

        flat_path = tmp_path / "flat.json"
        assert (
            run(
                [
                    "ingest",
                    "stix",
                    "--bundle",
                    str(bundle_path),
                    "--out",
                    str(flat_path),
                    "--no-collapse",
                ]
            )
            == 0
        )
        flat = load_catalog(flat_path)
        assert flat.technique_ids() == ("T1566", "T1566.001")
        assert flat.mappings == (("M1017", "T1566.001"),)


class TestMatrix:
    def test_export_layout(self, fixture_dir, capsysbinary):
        code = run(
            [
                "matrix",
                "--catalog",
                str(fixture_dir / "paper_v13_catalog.json"),
                "--weights",
                str(fixture_dir / "paper_v13_weights.csv"),
                "--out",
                "-",
            ]
        )
        assert code == 0
        lines = capsysbinary.readouterr().out.decode().splitlines()
        assert lines[0].startswith("weight,")
        assert lines[1].startswith("mitigation_id,")
        assert len(lines) == 2 + 18


class TestRank:
    def test_json_plan_byte_stable(self, fixture_dir, tmp_path):
        first = tmp_path / "plan1.json"
        second = tmp_path / "plan2.json"
        assert run(_rank_args(fixture_dir, "--out", str(first))) == 0
        assert run(_rank_args(fixture_dir, "--out", str(second))) == 0
        assert first.read_bytes() == second.read_bytes()
        doc = json.loads(first.read_text())
        assert doc["method"] == "wsm"
        assert doc["timestamp"] == 1700000000
        top = doc["entries"][0]
        assert top["mitigation_id"] == "M1026"
        assert top["score"] == pytest.approx(3.428588, abs=2e-5)

    def test_top_truncates_csv(self, fixture_dir, capsysbinary):
        code = run(
            _rank_args(fixture_dir, "--top", "3", "--format", "csv", "--out", "-")
        )
        assert code == 0
        lines = capsysbinary.readouterr().out.decode().splitlines()
        assert len(lines) == 4
        assert lines[1].startswith("1,M1026,,3.428588,")

    def test_md_format(self, fixture_dir, capsysbinary):
        code = run(_rank_args(fixture_dir, "--format", "md", "--out", "-"))
        assert code == 0
        out = capsysbinary.readouterr().out.decode()
        assert out.startswith("| rank | mitigation_id | name | score | covered_techniques |")

    def test_wpm_zero_cell_is_data_error(self, fixture_dir, tmp_path, capsys):
        code = run(
            _rank_args(fixture_dir, "--method", "wpm", "--out", str(tmp_path / "p.json"))
        )
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error:")
        assert "M1013" in err and "T1053" in err

    def test_wpm_epsilon_policy_succeeds(self, fixture_dir, tmp_path):
        out = tmp_path / "wpm.json"
        code = run(
            _rank_args(
                fixture_dir,
                "--method",
                "wpm",
                "--zero-policy",
                "epsilon",
                "--out",
                str(out),
            )
        )
        assert code == 0
        assert json.loads(out.read_text())["method"] == "wpm"

    def test_bad_top_value(self, fixture_dir, tmp_path, capsys):
        code = run(_rank_args(fixture_dir, "--top", "0", "--out", str(tmp_path / "p.json")))
        assert code == 1
        assert "--top" in capsys.readouterr().err

    def test_missing_catalog_file(self, fixture_dir, tmp_path, capsys):
        code = run(
            [
                "rank",
                "--catalog",
                str(tmp_path / "missing.json"),
                "--weights",
                str(fixture_dir / "paper_v13_weights.csv"),
                "--out",
                "-",
            ]
        )
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")


class TestSimulate:
    def _simulate(self, fixture_dir, campaign, out=None, trials="500"):
        args = [
            "simulate",
            "--catalog",
            str(fixture_dir / "paper_v13_catalog.json"),
            "--weights",
            str(fixture_dir / "paper_v13_weights.csv"),
            "--campaign",
            campaign,
            "--trials",
            trials,
            "--seed",
            "42",
        ]
        if out:
            args += ["--out", out]
        return run(args)

    def test_reference_campaign_report(self, fixture_dir, capsys):
        assert self._simulate(fixture_dir, "T1053,T1059") == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "campaign: T1053,T1059 (threshold 1)"
        assert out[1] == "plan steps to block: 1"
        assert out[2].startswith("baseline over 500 trials (seed 42): mean ")
        assert out[3].startswith("plan advantage: ")

    def test_subtechnique_spelling_equivalent(self, fixture_dir, tmp_path, capsys):
        exact_out = tmp_path / "exact.json"
        sub_out = tmp_path / "sub.json"
        assert self._simulate(fixture_dir, "T1053,T1059", out=str(exact_out)) == 0
        exact_text = capsys.readouterr().out.splitlines()
        assert self._simulate(fixture_dir, "T1053.005,T1059.001", out=str(sub_out)) == 0
        sub_text = capsys.readouterr().out.splitlines()
        assert exact_out.read_bytes() == sub_out.read_bytes()
        assert exact_text[1:] == sub_text[1:]

    def test_unknown_campaign_technique(self, fixture_dir, capsys):
        assert self._simulate(fixture_dir, "T9999") == 1
        assert "T9999" in capsys.readouterr().err

    def test_never_blocked_baseline_line(self, fixture_dir, capsys):
        args = [
            "simulate",
            "--catalog",
            str(fixture_dir / "paper_v13_catalog.json"),
            "--weights",
            str(fixture_dir / "paper_v13_weights.csv"),
            "--campaign",
            "T1112",
            "--k",
            "2",
            "--trials",
            "20",
            "--seed",
            "1",
        ]
        assert run(args) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[1] == "plan steps to block: never"
        assert out[2].endswith("never blocked")
        assert len(out) == 3


class TestScore:
    def test_risk(self, capsys):
        assert run(["score", "risk", "--threat", "0.8", "--vuln", "0.5", "--impact", "10"]) == 0
        assert capsys.readouterr().out.strip() == "4.000000"

    def test_risk_rejects_out_of_range(self, capsys):
        assert run(["score", "risk", "--threat", "1.5", "--vuln", "0.5", "--impact", "1"]) == 1
        assert capsys.readouterr().err.startswith("error:")

    def test_cvss_reference_vector(self, capsys):
        assert run(["score", "cvss", "--av", "N", "--ac", "L", "--pr", "N", "--ui", "N"]) == 0
        assert capsys.readouterr().out.strip() == "3.887043"

    def test_cvss_scope_changes_privilege_weight(self, capsys):
        assert run(["score", "cvss", "--av", "N", "--ac", "L", "--pr", "L", "--ui", "N"]) == 0
        unchanged = float(capsys.readouterr().out)
        assert (
            run(
                [
                    "score",
                    "cvss",
                    "--av",
                    "N",
                    "--ac",
                    "L",
                    "--pr",
                    "L",
                    "--ui",
                    "N",
                    "--scope-changed",
                ]
            )
            == 0
        )
        changed = float(capsys.readouterr().out)
        assert changed > unchanged
