import pytest
import yaml

from tdot.core.config import FLAT_KEYS, ConfigLoader, RunConfig, flatten
from tdot.core.exceptions import ConfigurationError


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv("TDOT_CONFIG", raising=False)
    for key in FLAT_KEYS:
        monkeypatch.delenv(f"TDOT_{key.upper()}", raising=False)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        yaml.safe_dump(
            {
                "model": {"eps_d": -0.25, "g1": 0.2},
                "sweep": {"method": "gpp", "k_points": 11},
                "log_level": "debug",
            }
        )
    )
    return path


def test_defaults():
    config = ConfigLoader().load_config()
    assert config.sweep.method == "floquet"
    assert config.floquet.n_modes == 31
    assert config.gpp.nu_max == 8
    assert config.model.g1 == 0.25
    assert config.output.output is None
    assert config.workers >= 1


def test_file_values(config_file):
    config = ConfigLoader(str(config_file)).load_config()
    assert config.model.eps_d == -0.25
    assert config.model.g1 == 0.2
    assert config.sweep.method == "gpp"
    assert config.sweep.k_points == 11
    assert config.log_level == "DEBUG"


def test_config_path_from_environment(monkeypatch, config_file):
    monkeypatch.setenv("TDOT_CONFIG", str(config_file))
    assert ConfigLoader().load_config().sweep.method == "gpp"


def test_precedence(monkeypatch, config_file):
    loader = ConfigLoader(str(config_file))
    monkeypatch.setenv("TDOT_G1", "0.1")
    monkeypatch.setenv("TDOT_SELF_CHECK", "true")
    config = loader.load_config()
    assert config.model.g1 == 0.1
    assert config.self_check is True

    config = loader.load_config({"g1": "0.05", "k_points": "7", "threads": None})
    assert config.model.g1 == 0.05
    assert config.sweep.k_points == 7
    assert config.threads is None


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"bogus": 1}, "bogus"),
        ({"n_modes": 30}, "n_modes"),
        ({"k_points": "many"}, "k_points"),
        ({"k_max": 3.2}, "k_max"),
        ({"method": "exact"}, "method"),
        ({"format": "xml"}, "format"),
        ({"g0": 0.2, "g1": 0.3}, "g0"),
        ({"log_level": "chatty"}, "log_level"),
        ({"oracle_enabled": "sometimes"}, "oracle_enabled"),
        ({"flip_k": 3.5}, "flip_k"),
    ],
)
def test_invalid_values(overrides, field):
    with pytest.raises(ConfigurationError) as excinfo:
        ConfigLoader().load_config(overrides)
    assert excinfo.value.field == field
    assert excinfo.value.exit_code == 2


def test_unknown_key_in_section(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("model:\n  n_modes: 31\n")
    with pytest.raises(ConfigurationError, match="n_modes"):
        ConfigLoader(str(path)).load_config()


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        ConfigLoader(str(tmp_path / "absent.yaml")).load_config()

    path = tmp_path / "broken.yaml"
    path.write_text("model: [unclosed\n")
    with pytest.raises(ConfigurationError) as excinfo:
        ConfigLoader(str(path)).load_config()
    assert excinfo.value.field == "config"


def test_sectioned_round_trip(config_file):
    config = ConfigLoader(str(config_file)).load_config()
    data = config.to_dict()
    assert set(data) >= {"model", "sweep", "oracle", "log_level"}
    assert RunConfig.from_dict(data) == config
    assert ConfigLoader.from_dict(data) == config
    assert RunConfig.from_flat(config.to_flat()) == config


def test_flatten_rejects_unknown_sections():
    with pytest.raises(ConfigurationError, match="plotting"):
        flatten({"plotting": {"dpi": 300}})
    assert flatten({"floquet": {"n_modes": 41}, "threads": 2}) == {
        "n_modes": 41,
        "threads": 2,
    }
