"""Run configuration: validation, round trips, and resource loading."""

import json

import pytest

from growthlab import render
from growthlab.config import RunConfig, load_config, save_config


class TestValidation:
    def test_defaults_are_valid(self):
        cfg = RunConfig()
        assert cfg.resolution == render.RESOLUTION
        assert cfg.condition == "incremental"

    def test_bad_resolution(self):
        with pytest.raises(ValueError):
            RunConfig(resolution=4)

    def test_bad_chain_steps(self):
        with pytest.raises(ValueError):
            RunConfig(chain_steps={"incremental": 0, "block": 80})

    def test_bad_condition(self):
        with pytest.raises(ValueError):
            RunConfig(condition="sideways")

    def test_missing_grammar_path(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            RunConfig(grammar_path=str(tmp_path / "nope.txt"))


class TestRoundTrip:
    def test_json_round_trip(self):
        cfg = RunConfig(resolution=64, seed=9,
                        chain_steps={"incremental": 100, "block": 50})
        again = RunConfig.from_json(cfg.to_json())
        assert again == cfg

    def test_file_round_trip(self, tmp_path):
        cfg = RunConfig(seed=3, n_chains=2)
        save_config(cfg, tmp_path / "run.json")
        assert load_config(tmp_path / "run.json") == cfg


class TestResources:
    def test_default_grammar_loads(self):
        g = RunConfig().grammar()
        assert g.start in g.productions
        assert len(g.angles) >= 2

    def test_custom_grammar_path(self, tmp_path):
        (tmp_path / "g.txt").write_text(
            "angles: 90\nStart -> F | + F +\n")
        cfg = RunConfig(grammar_path=str(tmp_path / "g.txt"))
        assert cfg.grammar().angles == (90.0,)

    def test_default_ink(self):
        assert RunConfig().ink() == render.InkParams()

    def test_custom_ink_path(self, tmp_path):
        (tmp_path / "ink.json").write_text(json.dumps(
            {"ink_per_unit_length": 3.0, "blur_halfwidth": 2,
             "noise_floor": 1e-3}))
        ink = RunConfig(ink_path=str(tmp_path / "ink.json")).ink()
        assert ink == render.InkParams(3.0, 2, 1e-3)
