import csv
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from faultstab.cli import main, run
from faultstab.config import ConfigError, ExperimentConfig, load_config, make_rng
from faultstab.results import format_value

SMALL = {
    "grid": [5, 5],
    "quadrature": [8, 8],
    "basis": [2, 2],
    "lipschitz": {"pairs": 12, "directions_per_base": 2},
    "rank": {"samples": 3},
    "growth": {"directions": [[0, 0, 1]], "steps": [0.0, 0.001, 0.01, 0.1]},
    "projector": {"steps": [0.0, 0.01, 0.1]},
}


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig({})
        assert cfg["seed"] == 20240917 and cfg.box.exclude_horizontal

    @pytest.mark.parametrize("raw,field", [
        ({"lame": {"mu": -1}}, "lame"),
        ({"bogus": 1}, "bogus"),
        ({"grid": [1, 5]}, "grid"),
        ({"admissible": {"upper": [0.3, 0.3, -0.1]}}, "admissible"),
        ({"slip": {"kind": "spiral"}}, "slip"),
        ({"seed": "x"}, "seed"),
    ])
    def test_validation_names_field(self, raw, field):
        with pytest.raises(ConfigError) as exc:
            ExperimentConfig(raw)
        assert exc.value.field.startswith(field)

    def test_digest_stable(self):
        assert ExperimentConfig({}).digest() == ExperimentConfig({"seed": 20240917}).digest()
        assert ExperimentConfig({}).digest() != ExperimentConfig({"seed": 1}).digest()

    def test_rng_streams(self):
        a = make_rng(1, 0).random(4)
        assert np.array_equal(a, make_rng(1, 0).random(4))
        assert not np.array_equal(a, make_rng(1, 1).random(4))

    def test_bad_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
        p = tmp_path / "bad.json"
        p.write_text("{")
        with pytest.raises(ConfigError):
            load_config(p)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_csv_floats_roundtrip(x):
    assert float(format_value(x)) == x


def test_csv_bools():
    assert format_value(True) == "1" and format_value(np.bool_(False)) == "0"


class TestMain:
    def test_integrals(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["verify-integrals", "--out", str(out)]) == 0
        rows = _csv(out / "integrals.csv")
        assert rows[0] == ["name", "computed", "target", "abs_error"] and len(rows) == 13
        s = json.loads((out / "summary.json").read_text())
        assert s["passed"] and s["rng"]["name"] == "Philox" and s["config"]["seed"] == 20240917
        assert "PASS" in capsys.readouterr().out

    def test_config_error_exit_2(self, tmp_path, capsys):
        path = _write(tmp_path, {"lame": {"mu": 0}})
        assert main(["verify-integrals", "--config", path, "--out", str(tmp_path / "o")]) == 2
        assert "lame.mu" in capsys.readouterr().err

    def test_missing_config_exit_2(self, tmp_path):
        assert main(["verify-integrals", "--config", str(tmp_path / "nope.json")]) == 2

    def test_bad_threads_exit_2(self, tmp_path):
        assert main(["verify-integrals", "--threads", "0", "--out", str(tmp_path)]) == 2

    def test_threshold_exit_3(self, tmp_path, capsys):
        path = _write(tmp_path, {"integrals": {"tolerance": 1e-300}})
        assert main(["verify-integrals", "--config", path, "--out", str(tmp_path / "o")]) == 3
        assert "failed: limits" in capsys.readouterr().out

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_identity_and_transport(self, tmp_path):
        path = _write(tmp_path, {"identities": {"draws": 10}, "transport": {"grids": [16, 32]}})
        assert main(["identity-check", "--config", path, "--out", str(tmp_path / "i")]) == 0
        assert main(["transport-check", "--config", path, "--out", str(tmp_path / "t")]) == 0
        assert len(_csv(tmp_path / "i" / "identities.csv")) == 11


class TestAssembleCache:
    def test_hit_is_bit_identical(self, tmp_path):
        cfg = ExperimentConfig(SMALL)
        first = run("assemble", cfg, str(tmp_path))
        second = run("assemble", cfg, str(tmp_path))
        assert first.summary["results"]["cache"] == "miss"
        assert second.summary["results"]["cache"] == "hit"
        assert first.summary["results"]["matrix_sha256"] == second.summary["results"]["matrix_sha256"]
        assert (tmp_path / "operator.fstb").read_bytes()[:4] == b"FSTB"

    def test_stale_cache_warns_and_rebuilds(self, tmp_path):
        run("assemble", ExperimentConfig(SMALL), str(tmp_path))
        changed = ExperimentConfig({**SMALL, "m0": [0.2, -0.1, -2.5]})
        with pytest.warns(UserWarning, match="rejected"):
            res = run("assemble", changed, str(tmp_path))
        assert res.summary["results"]["cache"] == "stale"
        assert run("assemble", changed, str(tmp_path)).summary["results"]["cache"] == "hit"


@pytest.mark.parametrize("sub", ["lipschitz-scan", "rank-scan", "residual-growth", "projector-scan"])
def test_scans_deterministic(tmp_path, sub):
    cfg = ExperimentConfig(SMALL)
    a = run(sub, cfg, str(tmp_path / "a"), threads=1)
    b = run(sub, cfg, str(tmp_path / "b"), threads=3)
    assert a.csv_paths
    for pa, pb in zip(a.csv_paths, b.csv_paths):
        assert open(pa, "rb").read() == open(pb, "rb").read()


def test_seed_changes_scan(tmp_path):
    a = run("lipschitz-scan", ExperimentConfig(SMALL), str(tmp_path / "a"))
    b = run("lipschitz-scan", ExperimentConfig({**SMALL, "seed": 5}), str(tmp_path / "b"))
    assert open(a.csv_paths[0], "rb").read() != open(b.csv_paths[0], "rb").read()
