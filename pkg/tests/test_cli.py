import json
from pathlib import Path

import pandas as pd
import pytest

from analyzer import Analyzer
from cli import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, OutputHandler, RunConfig, main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _config(name: str) -> dict:
    return json.loads((CONFIGS / name).read_text(encoding="utf-8"))


def _write(tmp_path: Path, document: dict) -> str:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def _manifest(out: Path) -> dict:
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


def test_binary_full_pipeline(tmp_path):
    out = tmp_path / "run"
    code = main(["full-pipeline", "--config", str(CONFIGS / "binary_normal.json"), "--out", str(out)])
    assert code == EXIT_OK
    for name in ("ccp.csv", "beta.json", "h.csv", "deconv.json", "gamma.json", "fg.csv", "manifest.json"):
        assert (out / name).exists(), name
    beta = json.loads((out / "beta.json").read_text(encoding="utf-8"))["0"]
    assert beta["beta0"] == pytest.approx(0.5, abs=0.01)
    assert beta["beta1"] == pytest.approx(1.0, abs=0.01)
    manifest = _manifest(out)
    assert manifest["exit_status"] == EXIT_OK
    assert manifest["flags"] == []
    assert manifest["columns"]["ccp.csv"] == ["y", "w", "z2_index", "z1", "mu"]
    assert set(manifest["versions"]) >= {"numpy", "scipy", "pandas", "pydantic", "python"}


def test_runs_are_byte_identical(tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert main(["recover-h", "--config", str(CONFIGS / "binary_normal.json"), "--out", str(out)]) == EXIT_OK
    for name in ("h.csv", "deconv.json", "gamma.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    assert _manifest(outs[0])["config_hash"] == _manifest(outs[1])["config_hash"]


def test_zero_z2_is_a_configuration_error(tmp_path, capsys):
    document = _config("binary_normal.json")
    del document["model"]["z2_grid"]
    document["model"]["z2_points"] = [[0.0], [1.0]]
    code = main(["forward", "--config", _write(tmp_path, document), "--out", str(tmp_path / "run")])
    assert code == EXIT_INPUT
    assert "z2 = 0" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["forward", "--config", str(tmp_path / "absent.json")]) == EXIT_INPUT


def test_bad_regularization_flag(tmp_path):
    code = main(["forward", "--config", str(CONFIGS / "binary_normal.json"), "--out", str(tmp_path), "--reg", "bogus:1"])
    assert code == EXIT_INPUT


def test_model_experiment_rejects_game_config(tmp_path):
    code = main(["ident-beta", "--config", str(CONFIGS / "rationalizability_game.json"), "--out", str(tmp_path)])
    assert code == EXIT_INPUT


def test_overrides_are_echoed(tmp_path):
    out = tmp_path / "run"
    code = main(["forward", "--config", str(CONFIGS / "binary_normal.json"), "--out", str(out),
                 "--reg", "tikhonov:1e-4", "--seed", "9"])
    assert code == EXIT_OK
    config = _manifest(out)["config"]
    assert config["regularization"] == {"kind": "tikhonov", "lam": 1e-4}
    assert config["seed"] == 9
    assert config["experiment"] == "forward"


def test_sparse_sample_flags_empty_cells(tmp_path):
    document = _config("binary_normal.json")
    document["sample_size"] = 50
    out = tmp_path / "run"
    assert main(["forward", "--config", _write(tmp_path, document), "--out", str(out)]) == EXIT_NUMERICAL
    manifest = _manifest(out)
    assert "empty_cells" in manifest["flags"]
    assert manifest["exit_status"] == EXIT_NUMERICAL


def test_game_forward_writes_regions(tmp_path):
    out = tmp_path / "run"
    code = main(["forward", "--config", str(CONFIGS / "rationalizability_game.json"), "--out", str(out)])
    assert code == EXIT_OK
    regions = json.loads((out / "regions.json").read_text(encoding="utf-8"))
    assert regions["region_map"]["thresholds"]["a"] == pytest.approx([-0.5, 0.25])
    assert all(regions["separation_conditions"].values())
    raster = pd.read_csv(out / "regions_raster.csv", dtype={"y": str})
    assert list(raster.columns) == ["v1", "v2", "y", "h"]
    assert raster.groupby(["v1", "v2"])["h"].sum().round(12).eq(1.0).all()


def test_game_classification(tmp_path):
    out = tmp_path / "run"
    code = main(["game-classify", "--config", str(CONFIGS / "rationalizability_game.json"), "--out", str(out)])
    assert code in (EXIT_OK, EXIT_NUMERICAL)
    concept = json.loads((out / "concept.json").read_text(encoding="utf-8"))
    assert concept["concept"] == "rationalizability"
    assert _manifest(out)["exit_status"] == code


def test_partial_outcome_pair_is_flagged(tmp_path):
    document = _config("rationalizability_game.json")
    document["outcome_pair"] = [[0, 0], [1, 0]]
    out = tmp_path / "run"
    assert main(["game-classify", "--config", _write(tmp_path, document), "--out", str(out)]) == EXIT_NUMERICAL
    assert "unclassifiable" in _manifest(out)["flags"]


def test_analyzer_reports_status(tmp_path):
    document = _config("binary_normal.json")
    document["experiment"] = "forward"
    config = RunConfig.model_validate(document)
    analyzer = Analyzer(config, OutputHandler(str(tmp_path)))
    assert analyzer.get_status() == "idle"
    results = analyzer.run()
    assert analyzer.get_status() == "complete"
    assert results["ccp"].values.shape == (2, 1, 33, 65)
    assert analyzer.exit_status() == 0


def test_input_error_mid_run_writes_a_partial_manifest(tmp_path):
    document = _config("rationalizability_game.json")
    document["outcome_pair"] = [[0, 1], [1, 1]]
    out = tmp_path / "run"
    assert main(["game-classify", "--config", _write(tmp_path, document), "--out", str(out)]) == EXIT_INPUT
    manifest = _manifest(out)
    assert manifest["exit_status"] == EXIT_INPUT
    assert "InputError" in manifest["flags"]


def test_unexpected_error_is_mapped(tmp_path, monkeypatch, capsys):
    def broken(self):
        raise KeyError("stage")

    monkeypatch.setattr(Analyzer, "run_forward", broken)
    out = tmp_path / "run"
    assert main(["forward", "--config", str(CONFIGS / "binary_normal.json"), "--out", str(out)]) == EXIT_NUMERICAL
    assert "unexpected failure" in capsys.readouterr().err
    manifest = _manifest(out)
    assert manifest["exit_status"] == EXIT_NUMERICAL
    assert manifest["flags"] == ["KeyError"]
