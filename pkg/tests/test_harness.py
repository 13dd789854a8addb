import json
import math
from pathlib import Path

import pytest

from conftest import ELL_REF, REF_MASS
from evanescent.cli import main
from evanescent.fitting import fit_exponential
from evanescent.harness import (
    ConfigError,
    SweepConfig,
    compare_scenarios,
    csv_text,
    load_config,
    parse_config,
    read_report,
    run_scenario,
    write_report,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cfg(text, scenario=None):
    return SweepConfig.from_mapping(parse_config(text), scenario)


def test_parse_values():
    raw = parse_config("""
        # comment
        scenario = suppression
        mass = 1e-27   # trailing comment
        separations = 1e-9, 2e-9
        separations_over_ell = 1:3:3
        seed = 7
        label = 'x'
    """)
    assert raw["mass"] == 1e-27
    assert raw["separations"] == (1e-9, 2e-9)
    assert raw["separations_over_ell"] == (1.0, 2.0, 3.0)
    assert raw["seed"] == 7 and isinstance(raw["seed"], int)
    assert raw["label"] == "x"


@pytest.mark.parametrize("text", [
    "mass 1e-27",
    "1mass = 3",
    "mass = 1\nmass = 2",
])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("text", [
    "scenario = nonsense",
    "",
    "scenario = suppression\nmass = -1",
    "scenario = suppression\nmass = abc",
    "scenario = suppression\nbogus = 1",
    "scenario = suppression\ntol_bogus = 1",
    "scenario = suppression\nseparations = 1e-9\nseparations_over_ell = 1",
    "scenario = suppression\nseparations = -1e-9",
    "scenario = correlator\nseparations = 0, 1e-9",
    "scenario = splitting\nbinding_energy_ev = 0\nseparations = 1e-10",
    "scenario = splitting\nn_points = 8",
    "scenario = entanglement\ntheta_max = 0.1",
    "scenario = suppression\nbinding_energy_ev = 0",
    "scenario = suppression\nspatial_dimension = 2",
    "scenario = suppression\nseed = -3",
])
def test_config_validation(text):
    with pytest.raises(ConfigError):
        cfg(text)


def test_scenario_mismatch():
    with pytest.raises(ConfigError, match="not"):
        cfg("scenario = correlator", "suppression")


def test_tolerance_override_and_defaults():
    c = cfg("scenario = suppression\ntol_fit_relative = 1e-6")
    assert c.tolerances["fit_relative"] == 1e-6
    assert len(c.resolved_separations()) == 20
    assert c.resolved_separations()[0] == pytest.approx(ELL_REF, rel=1e-12)


def test_load_config_seed_override():
    c = load_config(CONFIGS / "suppression.cfg", "suppression", seed=99)
    assert c.seed == 99


def test_suppression_reference():
    rep = run_scenario(load_config(CONFIGS / "suppression.cfg"))
    s = rep.summary
    assert s["suppression_length_m"] == pytest.approx(5.89e-12, rel=1e-3)
    assert s["checks"]["picometer_scale"]["label"] == "picometer scale: PASS"
    assert rep.passed and rep.exit_code == 0
    d, la = rep.column("separation_m"), rep.column("log_amplitude")
    assert la[d.index(1e-6)] == pytest.approx(-1.6974384437332614e5, rel=1e-12)


def test_suppression_free_limit():
    rep = run_scenario(cfg("scenario = suppression\nbinding_energy_ev = 0\n"
                           "separations = 1e-9, 1e-6"))
    assert "AH limit: no suppression" in rep.summary["flags"]
    assert rep.column("log_amplitude") == [0.0, 0.0]
    assert rep.passed


def test_suppression_noise_is_seeded():
    text = "scenario = suppression\nnoise = 0.01\nseed = 3"
    a, b = run_scenario(cfg(text)), run_scenario(cfg(text))
    assert csv_text(a) == csv_text(b)
    other = run_scenario(cfg(text.replace("seed = 3", "seed = 4")))
    assert csv_text(other) != csv_text(a)
    assert a.summary["fit"]["decay_length"] == pytest.approx(ELL_REF, rel=0.02)


def test_splitting_scenario():
    rep = run_scenario(load_config(CONFIGS / "splitting.cfg"))
    fit = rep.summary["fit"]
    assert fit["decay_length"] == pytest.approx(rep.summary["effective_suppression_length_m"],
                                                rel=0.10)
    assert fit["r_squared"] >= 0.999
    assert rep.passed


def test_correlator_scenario():
    rep = run_scenario(load_config(CONFIGS / "correlator.cfg"))
    assert max(rep.column("abs_diff")) <= 1e-6
    assert rep.summary["checks"]["nonrel_consistency"]["pass"]
    assert rep.passed


def test_correlator_free_limit_flag():
    rep = run_scenario(load_config(CONFIGS / "correlator_free.cfg"))
    assert "AH limit: no suppression" in rep.summary["flags"]
    assert all(math.isnan(v) for v in rep.column("log_value_quadrature"))
    assert rep.passed


def test_correlator_three_dimensional():
    rep = run_scenario(cfg("scenario = correlator\nspatial_dimension = 3\n"
                           "separations_over_ell = 0.5, 1, 2"))
    assert rep.passed


def test_entanglement_scenario():
    rep = run_scenario(load_config(CONFIGS / "entangle.cfg"))
    fit = rep.summary["fit"]
    assert fit["decay_length"] == pytest.approx(ELL_REF / 2, rel=1e-3)
    assert rep.passed


def test_abort_when_most_points_fail():
    # an unreachable quadrature tolerance fails every point
    text = ("scenario = correlator\nseparations_over_ell = 0.5, 1, 2, 5, 10\n"
            "quadrature_tolerance = 1e-30")
    with pytest.raises(RuntimeError, match="points failed"):
        run_scenario(cfg(text))


def test_per_point_failure_below_threshold(monkeypatch):
    from evanescent import harness

    real = harness._POINT_FUNCS["splitting"]

    def flaky(item):
        if item[0] > 9.5 * ELL_REF:
            raise ArithmeticError("boom")
        return real(item)

    monkeypatch.setitem(harness._POINT_FUNCS, "splitting", flaky)
    rep = run_scenario(cfg("scenario = splitting\nseparations_over_ell = 3:10:8\n"
                           "n_points = 2000"))
    assert len(rep.rows) == 7
    assert len(rep.summary["failures"]) == 1
    assert "boom" in rep.summary["failures"][0]["error"]


@pytest.mark.parametrize("name", ["suppression.cfg", "splitting.cfg", "entangle.cfg",
                                  "correlator.cfg"])
def test_determinism_across_workers(name):
    c = load_config(CONFIGS / name)
    assert csv_text(run_scenario(c, workers=1)) == csv_text(run_scenario(c, workers=2))


def test_csv_uses_full_precision():
    rep = run_scenario(load_config(CONFIGS / "suppression.cfg"))
    line = csv_text(rep).splitlines()[1]
    assert [float(v) for v in line.split(",")] == list(rep.rows[0])


def test_round_trip(tmp_path):
    rep = run_scenario(load_config(CONFIGS / "suppression.cfg"))
    csv_path, json_path = write_report(rep, tmp_path)
    back = read_report(json_path)
    assert back.rows == rep.rows
    summary = json.loads(json_path.read_text())
    refit = fit_exponential(zip(back.column("separation_m"), back.column("log_amplitude")))
    assert refit.as_dict() == summary["fit"]
    assert summary["suppression_length_m"] == back.column("ell_m")[0]
    assert summary["passed"] is True
    assert set(summary["metadata"]["versions"]) >= {"numpy", "scipy", "evanescent"}


def test_json_handles_non_finite(tmp_path):
    rep = run_scenario(load_config(CONFIGS / "correlator_free.cfg"))
    _, json_path = write_report(rep, tmp_path)
    summary = json.loads(json_path.read_text())
    assert summary["inputs"]["binding_energy_ev"] == 0


def test_compare_reference():
    rep = run_scenario(load_config(CONFIGS / "compare.cfg"))
    d, diff = rep.column("separation_m"), rep.column("exponent_difference")
    assert diff[d.index(1e-6)] == pytest.approx(1.6974384437332614e5, rel=1e-12)
    # linear in d
    for x, y in zip(d, diff):
        assert y / x == pytest.approx(1 / ELL_REF, rel=1e-12)
    assert rep.passed


def test_compare_identical_is_zero():
    a = run_scenario(cfg("scenario = suppression"))
    rep = compare_scenarios(a, a)
    assert all(v == 0.0 for v in rep.column("exponent_difference"))


def test_compare_rejects_mismatched():
    a = run_scenario(cfg("scenario = suppression\nseparations = 1e-9, 2e-9"))
    b = run_scenario(cfg("scenario = suppression\nseparations = 1e-9, 3e-9"))
    with pytest.raises(ValueError, match="mismatched"):
        compare_scenarios(a, b)
    c = run_scenario(load_config(CONFIGS / "correlator.cfg"))
    with pytest.raises(ValueError):
        compare_scenarios(a, c)


@pytest.mark.parametrize("command, name", [
    ("suppression", "suppression.cfg"),
    ("entangle", "entangle.cfg"),
    ("compare", "compare.cfg"),
    ("correlator", "correlator.cfg"),
])
def test_cli_success(tmp_path, command, name):
    assert main([command, "--config", str(CONFIGS / name), "--out", str(tmp_path)]) == 0
    scenario = "entanglement" if command == "entangle" else command
    assert (tmp_path / f"{scenario}.csv").exists()
    assert (tmp_path / f"{scenario}.json").exists()


def test_cli_tolerance_failure(tmp_path):
    path = tmp_path / "tight.cfg"
    path.write_text("scenario = correlator\nseparations_over_ell = 1, 2\n"
                    "tol_correlator_abs = 1e-30\n")
    assert main(["correlator", "--config", str(path), "--out", str(tmp_path)]) == 2


def test_cli_input_errors(tmp_path):
    assert main(["suppression", "--config", str(tmp_path / "missing.cfg"),
                 "--out", str(tmp_path)]) == 1
    bad = tmp_path / "bad.cfg"
    bad.write_text("scenario = suppression\nmass = -1\n")
    assert main(["suppression", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["suppression", "--config", str(CONFIGS / "suppression.cfg"),
                 "--out", str(tmp_path), "--workers", "0"]) == 1
    assert main(["suppression", "--config", str(CONFIGS / "correlator.cfg"),
                 "--out", str(tmp_path)]) == 1
