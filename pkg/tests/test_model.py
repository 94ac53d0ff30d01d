import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palzone.model import (
    ArrayGeometry,
    ConfigError,
    ExperimentConfig,
    FrequencyPlan,
    MediumParams,
    Zone,
    absorption_coefficient,
    iso9613_absorption,
    load_config,
    parse_override,
    validate_config,
    wavenumber,
)


def test_frequency_plan_carriers():
    plan = FrequencyPlan(40e3, 2e3)
    assert plan.f1 == 39e3 and plan.f2 == 41e3
    assert plan.f2 - plan.f1 == plan.f_audio
    assert plan.omega_audio == pytest.approx(2 * math.pi * 2e3)


def test_uniform_geometry_is_contiguous_and_centred():
    g = ArrayGeometry.uniform(24, 0.01)
    assert np.allclose(np.diff(g.centers), 0.01)
    assert g.aperture == pytest.approx((-0.12, 0.12))
    assert g.problems() == []


def test_zone_grid_includes_endpoints():
    z = Zone(-0.6, -0.3, 0.6, 0.9, 10, 10)
    pts = z.control_points
    assert pts.shape == (100, 2)
    assert pts[0].tolist() == [-0.6, 0.6] and pts[-1].tolist() == pytest.approx([-0.3, 0.9])
    assert pts[1, 0] > pts[0, 0] and pts[1, 1] == pts[0, 1]  # x fastest


def test_iso9613_reference_values():
    # ISO 9613-1 table, 20 C, 70 % RH, 101.325 kPa, in dB/km
    db_per_km = 1e3 * 20 * math.log10(math.e) * iso9613_absorption(np.array([1e3, 2e3, 4e3, 8e3]))
    assert db_per_km == pytest.approx([4.98, 9.02, 22.9, 76.6], rel=0.02)


def test_absorption_grows_with_frequency():
    f = np.array([1e3, 8e3, 20e3, 40e3, 60e3])
    a = absorption_coefficient(MediumParams(), f)
    assert np.all(np.diff(a) > 0)
    # ultrasound at 40 kHz loses on the order of 1 dB/m
    assert 0.5 < 8.686 * a[3] < 2.0


def test_absorption_override_and_wavenumber():
    m = MediumParams(alpha_override=0.25)
    assert absorption_coefficient(m, 1e3) == 0.25
    k = wavenumber(m, 343.0)
    assert k == pytest.approx(2 * math.pi + 0.25j)


@pytest.mark.parametrize("f", [0.0, -5.0, math.nan])
def test_absorption_rejects_bad_frequency(f):
    with pytest.raises(ValueError):
        absorption_coefficient(MediumParams(), f)


def test_defaults_validate():
    cfg = validate_config()
    assert cfg == ExperimentConfig()
    assert cfg.control_points.shape == (200, 2)
    assert cfg.bright_index.tolist() == list(range(100))


def test_validation_is_idempotent():
    cfg = validate_config({"optimizer": {"n_itr": 5}})
    assert validate_config(cfg) == cfg


def test_validation_collects_every_error():
    with pytest.raises(ConfigError) as exc:
        validate_config({"medium": {"c0": -1.0}, "optimizer": {"n_itr": 0}, "perturbation": {"n_trials": 0}})
    msgs = exc.value.errors
    assert any(m.startswith("medium.c0") for m in msgs)
    assert any(m.startswith("optimizer.n_itr") for m in msgs)
    assert any(m.startswith("perturbation.n_trials") for m in msgs)


@pytest.mark.parametrize(
    "raw, prefix",
    [
        ({"bogus": {}}, "bogus"),
        ({"medium": {"rho": 1.0}}, "medium.rho"),
        ({"bright": {"z_min": 0.0, "z_max": 0.5}}, "bright.z_min"),
        ({"array": {"element_centers": [0.0, 0.005], "n_elements": 2}}, "array.element_centers"),
        ({"audio_frequencies": [50e3]}, "audio_frequencies[0]"),
        ({"quadrature": {"x_min": 0.0}}, "quadrature.x_min"),
        ({"robustness": {"evaluate_on": "both"}}, "robustness.evaluate_on"),
        ({"quadrature": {"rule": 3}}, "quadrature.rule"),
    ],
)
def test_validation_errors_name_the_field(raw, prefix):
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    assert any(m.startswith(prefix) for m in exc.value.errors), exc.value.errors


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 40),
    width=st.floats(1e-3, 0.05),
    gap=st.floats(0.0, 0.02),
)
def test_uniform_arrays_always_validate(n, width, gap):
    g = ArrayGeometry.uniform(n, width, gap)
    assert g.problems() == []
    assert g.aperture[0] == pytest.approx(-g.aperture[1])


@settings(max_examples=60, deadline=None)
@given(st.floats(allow_nan=True, allow_infinity=True))
def test_sound_speed_validation_total(c0):
    ok = math.isfinite(c0) and c0 > 0
    if ok:
        validate_config({"medium": {"c0": c0}})
    else:
        with pytest.raises(ConfigError):
            validate_config({"medium": {"c0": c0}})


def test_parse_override_uses_toml_literals():
    assert parse_override("optimizer.n_itr=5") == ("optimizer.n_itr", 5)
    assert parse_override("audio_frequencies=[1000.0]") == ("audio_frequencies", [1000.0])
    assert parse_override("robustness.evaluate_on=clean") == ("robustness.evaluate_on", "clean")
    with pytest.raises(ConfigError):
        parse_override("novalue")


def test_load_config_with_zones_section(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text(
        "audio_frequencies = [2000.0]\n"
        "[array]\nn_elements = 4\n"
        "[zones.bright]\nx_min = -0.2\nx_max = -0.1\nz_min = 0.3\nz_max = 0.4\nnx = 3\nnz = 3\n"
    )
    cfg = load_config(p, ["zones.dark.nx=2", "optimizer.seed=7"])
    assert cfg.array.n_elements == 4
    assert cfg.bright.nx == 3 and cfg.dark.nx == 2
    assert cfg.optimizer.seed == 7


def test_load_config_reports_unreadable_and_malformed(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[medium\n")
    with pytest.raises(ConfigError):
        load_config(bad)
