import math

import pytest

from citedyn.params import ModelParams, load_params, save_params, with_overrides


def test_defaults_are_physics_1984():
    p = ModelParams()
    assert p.gamma == 1.2
    assert p.beta == 0.02
    assert p.alpha + p.beta == pytest.approx(0.046)
    assert p.p0_base == 0.34
    assert p.p0_slope == 0.82
    assert p.q_prefactor == 1.09
    assert p.fitness_mu == 1.62
    assert p.fitness_sigma == 1.1
    assert p.s_bar == 1.2
    assert p.horizon == 30


def test_derived_quantities():
    p = ModelParams()
    assert p.growth_exponent == pytest.approx(0.046)
    assert p.kernel_decay == pytest.approx(1.18)
    assert p.fitness_mean == pytest.approx(math.exp(1.62 + 0.5 * 1.1 ** 2))


@pytest.mark.parametrize("bad", [
    {"gamma": 0.0},
    {"gamma": -1.0},
    {"horizon": 0},
    {"p0_base": 0.0},
    {"fitness_sigma": 0.0},
    {"gamma": 0.5, "beta": 0.6},   # kernel would grow instead of decay
])
def test_invalid_params_rejected(bad):
    with pytest.raises(ValueError):
        ModelParams(**bad)


def test_config_round_trip(tmp_path):
    p = with_overrides(ModelParams(), gamma=1.3, horizon=20)
    path = tmp_path / "params.cfg"
    save_params(p, path)
    assert load_params(path) == p


def test_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "params.cfg"
    path.write_text("gamma=1.2\nnot_a_field=3\n")
    with pytest.raises(ValueError, match="unknown parameter"):
        load_params(path)


def test_config_comments_and_blank_lines(tmp_path):
    path = tmp_path / "params.cfg"
    path.write_text("# comment\n\ngamma=1.5   # inline\nbeta=0.01\n")
    p = load_params(path)
    assert p.gamma == 1.5 and p.beta == 0.01


def test_config_malformed_line(tmp_path):
    path = tmp_path / "params.cfg"
    path.write_text("gamma 1.2\n")
    with pytest.raises(ValueError, match="key=value"):
        load_params(path)
