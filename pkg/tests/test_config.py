import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from purcell_notch import config
from purcell_notch.config import RunConfig
from purcell_notch.errors import ConfigFileNotFound, ConfigParseError, ConfigValueError, UnknownConfigKey


def test_empty_document_gives_defaults():
    cfg = config.loads("")
    assert cfg == RunConfig()
    assert cfg.c_sigma_fF == 65 and cfg.l_r_nH == 1.2 and cfg.c_r_fF == 500
    assert cfg.omega_ge == pytest.approx(2 * math.pi * 5e9)


def test_negative_capacitance_names_field():
    with pytest.raises(ConfigValueError) as err:
        config.loads("c_sigma_fF = -1")
    assert err.value.field == "c_sigma_fF"
    assert "c_sigma_fF" in str(err.value)


@pytest.mark.parametrize(
    "text",
    [
        'c_sigma_fF = "big"',
        "sweep_points = 1.5",
        "anharmonicity_MHz = 10",
        "efficiency = 1.5",
        'convention = "radians"',
        "nbar_grid = [2.0, 1.0]",
        "tm_grid_us = []",
        "t1_thresholds_ms = [0.0]",
        "mc_points = [[1.0]]",
        "sweep_start_GHz = 7.0",
        "seed = -1",
        "mc_n_traj = true",
    ],
)
def test_value_errors(text):
    with pytest.raises(ConfigValueError):
        config.loads(text)


def test_unknown_key():
    with pytest.raises(UnknownConfigKey) as err:
        config.loads("c_sigma = 65")
    assert err.value.exit_code == 13


def test_parse_error():
    with pytest.raises(ConfigParseError):
        config.loads("c_sigma_fF = = 3")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigFileNotFound):
        config.parse_config(tmp_path / "none.toml")


def test_file_round_trip(tmp_path):
    p = tmp_path / "run.toml"
    p.write_text("qubit_freq_GHz = 5.2\ncf_sweep_fF = [0, 1]\n")
    cfg = config.parse_config(p)
    assert cfg.qubit_freq_GHz == 5.2 and cfg.cf_sweep_fF == (0.0, 1.0)


def test_inductance_sets_frequency():
    cfg = config.loads("l_j_nH = 15.6")
    assert cfg.qubit_freq_GHz == pytest.approx(1 / (2 * math.pi * math.sqrt(15.6e-9 * 65e-15)) / 1e9)
    assert config.loads(config.serialize(cfg)) == cfg


def test_conflicting_inductance_and_frequency():
    with pytest.raises(ConfigValueError):
        config.loads("l_j_nH = 15.6\nqubit_freq_GHz = 6.0")


def test_overrides():
    cfg = config.with_overrides(RunConfig(), seed=9, convention=None)
    assert cfg.seed == 9 and cfg.convention == "paper"
    assert config.with_overrides(RunConfig(), convention="angular").rate_convention == "angular"


positive = st.floats(0.1, 1e3)
valid_configs = st.builds(
    RunConfig,
    c_sigma_fF=positive,
    qubit_freq_GHz=st.floats(1, 10),
    anharmonicity_MHz=st.floats(-1e3, -1),
    c_r_fF=positive,
    l_r_nH=st.floats(0.1, 10),
    z_env_ohm=positive,
    cf_sweep_fF=st.lists(st.floats(0, 10), min_size=1, max_size=5).map(tuple),
    nbar_grid=st.lists(st.floats(0, 100), min_size=1, max_size=5, unique=True).map(lambda v: tuple(sorted(v))),
    mc_points=st.lists(st.tuples(st.floats(0, 50), st.floats(0.001, 5)), min_size=1, max_size=3).map(tuple),
    seed=st.integers(0, 2**31),
    convention=st.sampled_from(["paper", "angular"]),
    output_dir=st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=10),
)


@given(valid_configs)
@settings(max_examples=100)
def test_round_trip_property(cfg):
    assert config.loads(config.serialize(cfg)) == cfg
