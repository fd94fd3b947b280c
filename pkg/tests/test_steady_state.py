import copy

import numpy as np
import pytest

from hank2a.config import fast_config, validate_config
from hank2a.steady_state import (
    CalibrationTargets,
    annualized_bond_yield,
    calibrate,
    long_run_elasticity,
    solve_steady_state,
)


@pytest.fixture(scope="session")
def tiny_ss():
    from test_ssj import tiny_config
    return solve_steady_state(tiny_config())


class TestBaselineSS:
    def test_all_residuals_small(self, tiny_ss):
        for name, val in tiny_ss.residuals.items():
            assert abs(val) < 1e-8, (name, val)

    def test_walras_not_imposed_but_holds(self, tiny_ss):
        assert abs(tiny_ss.residuals["goods_market"]) < 1e-8

    def test_baseline_identities(self, tiny_ss):
        q = tiny_ss.quantities
        assert q["B"] == q["A_l"]                       # bonds absorb liquid savings
        assert q["r_R"] == pytest.approx(q["r_k"], abs=1e-12)
        assert q["u"] == pytest.approx(1.0, abs=1e-12)
        assert q["r_l"] == pytest.approx(q["r_k"] - tiny_ss.macro.varphi, abs=1e-12)

    def test_psi_invariance(self):
        """All Psi variants share the stationary equilibrium exactly."""
        from test_ssj import tiny_config
        base = None
        for Psi in (0.0, 0.005, 0.05, 1e6):
            cfg = tiny_config()
            cfg["liquidity"]["Psi"] = Psi
            ss = solve_steady_state(cfg)
            keys = ("Y", "K", "C", "r_l", "r_k", "B", "A_l", "G")
            vals = np.array([ss.quantities[k] for k in keys])
            if base is None:
                base = vals
            else:
                assert np.max(np.abs(vals - base)) < 1e-10

    def test_tolerance_tightening_stability(self):
        from test_ssj import tiny_config
        cfg1 = tiny_config()
        cfg2 = tiny_config()
        cfg2["numerics"]["tol_backward"] = cfg1["numerics"]["tol_backward"] / 10
        s1 = solve_steady_state(cfg1)
        s2 = solve_steady_state(cfg2)
        for k in ("Y", "C", "K", "r_k"):
            assert s2.quantities[k] == pytest.approx(s1.quantities[k], rel=1e-6)


class TestDebtTargetSS:
    def test_higher_debt_raises_bond_yield(self, tiny_ss):
        res = long_run_elasticity(tiny_ss.cfg, ss_base=tiny_ss)
        assert res["bp_per_pp"] > 0
        ss_new = res["ss_new"]
        for name, val in ss_new.residuals.items():
            assert abs(val) < 1e-7, (name, val)

    def test_segmented_stronger_than_integrated(self, tiny_ss):
        seg = long_run_elasticity(tiny_ss.cfg, ss_base=tiny_ss, Psi=np.inf)
        integ = long_run_elasticity(tiny_ss.cfg, ss_base=tiny_ss, Psi=0.0)
        mid = long_run_elasticity(tiny_ss.cfg, ss_base=tiny_ss)
        assert seg["bp_per_pp"] > mid["bp_per_pp"] > integ["bp_per_pp"]


class TestCalibration:
    def test_round_trip_on_small_grid(self):
        from test_ssj import tiny_config
        cfg = tiny_config()
        targets = CalibrationTargets()
        cfg2, report = calibrate(cfg, targets)
        validate_config(cfg2)
        for k, gap in report["target_gaps"].items():
            scale = getattr(targets, k if k != "B_Y" else "B_Y")
            assert abs(gap) / abs(scale) < 1e-5, (k, gap)
        # the calibrated config solves to a steady state hitting the targets
        ss = solve_steady_state(cfg2)
        q = ss.quantities
        assert q["K"] / q["Y"] == pytest.approx(targets.K_Y, rel=1e-4)
        assert q["A_l"] / q["Y"] == pytest.approx(targets.B_Y, rel=1e-4)
        assert q["r_l"] == pytest.approx(0.0, abs=1e-6)
        gap_annual = annualized_bond_yield(q["r_k"]) - annualized_bond_yield(q["r_l"])
        assert gap_annual == pytest.approx(0.0374, abs=0.003)
