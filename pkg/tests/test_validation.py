import numpy as np
import pytest

from eitsim.validation import (
    VG_REGIME_GRID,
    CheckReport,
    SlowLightSetup,
    adiabatic_vs_numeric_residuals,
    check_adiabatic_vs_numeric,
    check_resonance_chain,
    check_vg_consistency,
    format_table,
    random_eit_draw,
    resonance_chain_residual,
    run_all,
    vg_pair,
)
from eitsim.params import dimensionless_params


def test_report_pass_fail_rule():
    ok = CheckReport("x", "a", 0.01, 0.05, True, 0.0)
    assert ok.as_expected
    control = CheckReport("y", "a", 0.5, 0.05, False, 0.0, expected_fail=True)
    assert control.as_expected
    surprise = CheckReport("z", "a", 0.01, 0.05, True, 0.0, expected_fail=True)
    assert not surprise.as_expected
    d = control.to_dict()
    assert d["as_expected"] is True and d["residual"] == 0.5


def test_adiabatic_zero_probe_has_zero_residual():
    res = adiabatic_vs_numeric_residuals(0.0)
    assert res["rho_bc"] == 0 and res["rho_ab"] == 0


def test_adiabatic_tracks_bloch_for_weaker_probe():
    rep = check_adiabatic_vs_numeric(0.05)
    assert rep.passed and not rep.expected_fail
    assert rep.name == "adiabatic_vs_numeric"


def test_adiabatic_residual_grows_with_ground_state_depletion():
    # the linear theory keeps rho_bb = 1; the Bloch depletion 1 - rho_bb scales as the probe ratio squared
    res = {r: adiabatic_vs_numeric_residuals(r) for r in (0.003, 0.025, 0.05, 0.1, 0.2)}
    depletion = {r: 1.0 - v["rho_bb_final"] for r, v in res.items()}
    assert depletion[0.05] / depletion[0.025] == pytest.approx(4.0, rel=0.05)
    # once depletion dominates, the mismatch also grows roughly fourfold per doubling
    assert 3.0 < res[0.2]["rho_bc"] / res[0.1]["rho_bc"] < 5.0
    # for very weak probes only the probe-independent non-adiabatic floor remains
    assert res[0.003]["rho_bc"] < 0.01 and res[0.003]["rho_ab"] < 0.03


def test_adiabatic_negative_control_is_expected_fail():
    rep = check_adiabatic_vs_numeric(1.0)
    assert rep.name.endswith("negative_control")
    assert rep.expected_fail and not rep.passed and rep.as_expected
    assert rep.residual > 0.05


def test_resonance_chain_check():
    rep = check_resonance_chain()
    assert rep.passed and rep.residual <= 1e-12
    assert rep.runtime < 1.0


def test_resonance_chain_special_draws():
    atom, field = dimensionless_params()
    assert resonance_chain_residual(atom, field) <= 1e-12
    atom0, field0 = dimensionless_params(gamma_bc=0.0)
    assert resonance_chain_residual(atom0, field0) == 0


def test_random_draws_are_valid_and_seeded():
    a = [random_eit_draw(np.random.default_rng(5)) for _ in range(3)]
    b = [random_eit_draw(np.random.default_rng(5)) for _ in range(3)]
    assert a == b
    for atom, field in a:
        assert atom.gamma_ab > 0 and atom.kappa >= 0


def test_vg_consistency_check():
    rep = check_vg_consistency()
    assert rep.passed
    assert len(VG_REGIME_GRID) == 24
    assert all(ratio >= 10 for ratio, _, _ in VG_REGIME_GRID)
    assert rep.details["marginal_ratio3"] > 0
    assert rep.details["gamma_bc_0.01"] > rep.residual


def test_vg_pair_vacuum_gives_c():
    final, disp = vg_pair(0.0, 1e-3)
    assert final == pytest.approx(1.0) and disp == pytest.approx(1.0, rel=1e-12)


def test_slow_light_setup_targets():
    assert SlowLightSetup().analytic_vg() == pytest.approx(0.25)
    assert SlowLightSetup(omega_p_kappa=4.5).analytic_vg() == pytest.approx(0.1)
    # the analytic target is the long-pulse limit of the subluminal root
    assert SlowLightSetup().quadratic_root(1e-8) == pytest.approx(0.25, rel=1e-6)


def test_run_all_sorts_and_threads():
    def make(name):
        return lambda: CheckReport(name, "a", 0.0, 1.0, True, 0.0)

    reports = run_all([make("c"), make("a"), make("b")], threads=3)
    assert [r.name for r in reports] == ["a", "b", "c"]
    table = format_table(reports + [CheckReport("n", "a", 2.0, 1.0, False, 0.0, expected_fail=True)])
    assert "XFAIL" in table and table.count("PASS") == 3
