import json
from pathlib import Path

import pytest

from tiltsight.cli import main
from tiltsight.registry import ConfigError, load_config, merge


ROOT = Path(__file__).resolve().parents[1]
EXAMPLE_1 = ROOT / "data" / "examples" / "example-1.toml"
EXAMPLE_2 = ROOT / "data" / "examples" / "example-2.toml"


def read(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_build_writes_objects_and_ar_quiver(tmp_path, capsys):
    assert main(["build", "--n", "3", "--d", "2", "--out-dir", str(tmp_path)]) == 0
    payload = read(tmp_path / "objects.json")
    assert payload["count"] == 15
    assert payload["field"] == "Q"
    assert (tmp_path / "ar.dot").read_text(encoding="utf-8").startswith('digraph "A3_d2" {')
    assert '"count": 15' in capsys.readouterr().out


def test_build_classical_cluster_category(tmp_path):
    assert main(["build", "--n", "2", "--d", "1", "--out-dir", str(tmp_path)]) == 0
    assert read(tmp_path / "objects.json")["count"] == 5


def test_build_text_format(tmp_path, capsys):
    assert main(["build", "--n", "2", "--d", "2", "--format", "text", "--out-dir", str(tmp_path)]) == 0
    assert capsys.readouterr().out.startswith("A_2, d=2: 8 indecomposables")


def test_ct_check_exit_codes(tmp_path):
    assert main(["ct-check", "--config", str(EXAMPLE_1), "--out-dir", str(tmp_path)]) == 0
    assert read(tmp_path / "ct_check.json")["cluster_tilting"] is True
    assert main(["ct-check", "--n", "2", "--d", "2", "--M", "P(0,1)", "--out-dir", str(tmp_path)]) == 1
    assert read(tmp_path / "ct_check.json")["violations"]


def test_quotient_refuses_non_cluster_tilting_without_force(tmp_path, capsys):
    assert main(["quotient", "--n", "2", "--d", "2", "--M", "P(0,1)", "--out-dir", str(tmp_path)]) == 2
    assert "not cluster-tilting" in capsys.readouterr().err
    assert main(["quotient", "--n", "2", "--d", "2", "--M", "P(0,1)", "--force", "--out-dir", str(tmp_path)]) == 0


def test_quotient_writes_homs_and_quiver(tmp_path):
    assert main(["quotient", "--config", str(EXAMPLE_2), "--out-dir", str(tmp_path)]) == 0
    payload = read(tmp_path / "homs.json")
    assert len(payload["surviving"]) == 12
    assert payload["frobenius"] is False
    dot = (tmp_path / "quotient_ar.dot").read_text(encoding="utf-8")
    assert dot.count("->") == 13


def test_lambda_matches_the_configured_presentation(tmp_path):
    assert main(["lambda", "--config", str(EXAMPLE_2), "--out-dir", str(tmp_path)]) == 0
    payload = read(tmp_path / "lambda.json")
    assert payload["graded_dims"] == {"-1": 3, "0": 4}
    assert payload["presentation_match"] is not None


def test_selfinj_agrees_with_frobenius(tmp_path):
    assert main(["selfinj", "--config", str(EXAMPLE_1), "--out-dir", str(tmp_path)]) == 0
    payload = read(tmp_path / "selfinj.json")
    assert payload["frobenius"] is True
    assert payload["agree"] is True


def test_verify_passes_on_example_one(tmp_path):
    assert main(["verify", "--config", str(EXAMPLE_1), "--out-dir", str(tmp_path)]) == 0
    payload = read(tmp_path / "verify_report.json")
    assert payload["passed"] is True
    assert payload["bridge"]["pair_count"] == 36
    assert payload["golden_diff"] == []
    assert payload["witnesses_checked"] > 0


def test_verify_passes_on_example_two(tmp_path):
    assert main(["verify", "--config", str(EXAMPLE_2), "--out-dir", str(tmp_path)]) == 0
    payload = read(tmp_path / "verify_report.json")
    assert payload["passed"] is True
    assert payload["frobenius"] is False
    assert payload["bridge"]["pair_count"] == 144
    assert payload["golden_diff"] == []
    assert len(payload["bar_oracle"]) == 144
    assert all(row["bar"] == row["factoring"] and row["stable"] for row in payload["bar_oracle"])


def test_binary_field_reproduces_example_one(tmp_path):
    rational, binary = tmp_path / "q", tmp_path / "f2"
    assert main(["quotient", "--config", str(EXAMPLE_1), "--out-dir", str(rational)]) == 0
    assert main(["quotient", "--config", str(EXAMPLE_1), "--field", "Fp:2", "--out-dir", str(binary)]) == 0
    assert read(binary / "homs.json") == read(rational / "homs.json")
    assert main(["verify", "--config", str(EXAMPLE_1), "--field", "Fp:2", "--out-dir", str(binary)]) == 0
    payload = read(binary / "verify_report.json")
    assert payload["passed"] is True
    assert payload["bridge"]["pair_count"] == 36
    assert payload["golden_diff"] == []


def test_verify_fails_against_a_corrupted_golden(tmp_path):
    golden = read(ROOT / "data" / "golden" / "example-1.json")
    golden["quotient_arrows"].append(["P(0,2)", "P(1,2)"])
    corrupted = tmp_path / "golden.json"
    corrupted.write_text(json.dumps(golden), encoding="utf-8")
    code = main(["verify", "--config", str(EXAMPLE_1), "--golden", str(corrupted), "--skip-ar", "--out-dir", str(tmp_path)])
    assert code == 1
    payload = read(tmp_path / "verify_report.json")
    assert payload["passed"] is False
    assert payload["golden_diff"][0].startswith("quotient_arrows")


def test_usage_errors_exit_with_two(tmp_path):
    assert main(["build", "--out-dir", str(tmp_path)]) == 2
    assert main(["build", "--n", "2", "--d", "2", "--field", "Fp:4", "--out-dir", str(tmp_path)]) == 2
    assert main(["build", "--n", "2", "--d", "2", "--depth", "0", "--out-dir", str(tmp_path)]) == 2
    assert main(["ct-check", "--n", "2", "--d", "2", "--M", "P(7,7)", "--out-dir", str(tmp_path)]) == 2
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_flags_win_over_the_config_file():
    config = load_config(EXAMPLE_1)
    assert config.n == 2 and config.M == ("P(0,1)", "P(2,1)")
    assert config.golden == (ROOT / "data" / "golden" / "example-1.json").resolve()
    merged = merge(config, {"d": 3, "M": None, "force": False, "field": "Fp:3"})
    assert merged.d == 3
    assert merged.M == config.M
    assert merged.field == "Fp:3"
    with pytest.raises(ConfigError):
        merge(config, {"format": "yaml"})


def test_unknown_config_keys_are_rejected(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text('n = 2\nd = 2\ncolour = "blue"\n', encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)
    assert main(["build", "--config", str(path), "--out-dir", str(tmp_path)]) == 2
