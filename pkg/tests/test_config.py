"""TOML config loading tests: section/key validation, merging, defaults."""

import pytest

from signedrefine.config import (
    load_refine_config,
    load_toml,
    merge_mapping,
    refine_config_from_mapping,
    validate_mapping,
)

FULL = """
[structural]
alpha = 0.7
softmax_temp = 0.2
sr_mode = "sample"
rng_seed = 3

[boundary]
purge_threshold = 0.6
max_candidates_fraction = 0.5

[contrastive]
embed_dim = 16
epochs = 40
learning_rate = 0.01

[kmeans]
restarts = 3
init = "forgy"

[pipeline]
max_rounds = 5
convergence = "fixed-rounds"
enable_br = false
"""


class TestLoadToml:
    def test_full_file(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text(FULL)
        mapping = load_toml(path)
        assert mapping["structural"]["alpha"] == 0.7
        assert mapping["pipeline"]["enable_br"] is False

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text("[detector]\nembed_dim = 3\n")
        with pytest.raises(ValueError, match=r"unknown section \[detector\]"):
            load_toml(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text("[structural]\nalpha = 0.5\ntemperture = 0.1\n")
        with pytest.raises(ValueError, match="temperture"):
            load_toml(path)

    def test_syntax_error_reported_with_path(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[structural\nalpha = 0.5\n")
        with pytest.raises(ValueError, match="bad.toml"):
            load_toml(path)

    def test_scalar_section_rejected(self):
        with pytest.raises(ValueError, match="must be a table"):
            validate_mapping({"structural": 5})


class TestMergeMapping:
    def test_updates_win(self):
        base = {"structural": {"alpha": 0.5, "rng_seed": 1}}
        updates = {"structural": {"alpha": 0.9}, "pipeline": {"max_rounds": 7}}
        merged = merge_mapping(base, updates)
        assert merged["structural"] == {"alpha": 0.9, "rng_seed": 1}
        assert merged["pipeline"] == {"max_rounds": 7}
        # base is untouched
        assert base["structural"]["alpha"] == 0.5


class TestRefineConfigFromMapping:
    def test_empty_mapping_gives_defaults(self):
        cfg = refine_config_from_mapping({})
        assert cfg.max_rounds == 3
        assert cfg.convergence == "assignment-stable"
        assert cfg.structural.alpha == 0.5
        assert cfg.kmeans.k == 1

    def test_keys_reach_their_configs(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text(FULL)
        cfg = refine_config_from_mapping(load_toml(path))
        assert cfg.structural.mode == "sample"
        assert cfg.boundary.max_candidates_fraction == 0.5
        assert cfg.contrastive.embed_dim == 16
        assert cfg.kmeans.init == "forgy"
        assert cfg.max_rounds == 5
        assert cfg.enable_br is False

    def test_value_errors_propagate(self):
        with pytest.raises(ValueError, match="alpha"):
            refine_config_from_mapping({"structural": {"alpha": 2.0}})


class TestLoadRefineConfig:
    def test_no_file_no_overrides(self):
        cfg = load_refine_config()
        assert cfg.max_rounds == 3

    def test_overrides_on_top_of_file(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text("[pipeline]\nmax_rounds = 5\n")
        cfg = load_refine_config(path, {"pipeline": {"max_rounds": 9}})
        assert cfg.max_rounds == 9

    def test_overrides_validated(self):
        with pytest.raises(ValueError, match="overrides"):
            load_refine_config(None, {"pipeline": {"rounds": 9}})
