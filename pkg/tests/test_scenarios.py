import numpy as np
import pytest

from hank2a.filters import ImpulseBank, ShockSeries
from hank2a.scenarios import (
    ScenarioLab,
    alt_rule_news,
    apply_news_bundle,
    counterfactual_propagation,
    decompose_household_response,
    decompose_inflation_by_shock,
    fiscal_rule_sweep,
    misunderstood_rule,
    pi_tilde_comparison,
    transfer_experiment,
)
from hank2a.ssj import SHOCK_NAMES, ShockSpec
from hank2a.steady_state import solve_steady_state


@pytest.fixture(scope="session")
def lab():
    from test_ssj import tiny_config
    ss = solve_steady_state(tiny_config())
    return ScenarioLab(ss)


@pytest.fixture(scope="session")
def theta_B(lab):
    from hank2a.scenarios import reference_theta_B
    return reference_theta_B(lab.ss.cfg, lab.ss)


class TestTransferExperiment:
    def test_identical_psi_zero_difference(self, lab):
        base = lab.economy()
        res_same = transfer_experiment(lab, Psi_alt=lab.ss.macro.Psi)
        for v in ("pi", "Y", "C"):
            assert np.max(np.abs(res_same["difference"][v])) < 1e-10

    def test_debt_inflation_positive(self, lab):
        res = transfer_experiment(lab)
        cum_base = np.sum(res["baseline"]["pi"][:40])
        cum_alt = np.sum(res["alt"]["pi"][:40])
        assert cum_base > cum_alt

    def test_impact_consumption_nearly_equal(self, lab):
        res = transfer_experiment(lab)
        gap = abs(res["baseline"]["C"][0] - res["alt"]["C"][0])
        assert gap < 0.10 * abs(res["baseline"]["C"][0])

    def test_investment_falls_more_in_integrated_arm(self, lab):
        res = transfer_experiment(lab)
        assert res["alt"]["I"].min() < res["baseline"]["I"].min()


class TestDecompositions:
    def test_household_channels_sum_to_total(self, lab):
        res = transfer_experiment(lab)
        for output in ("C", "Ahh", "Khh"):
            dec = decompose_household_response(lab, res["baseline"], output)
            assert dec.additivity_gap() < 1e-9

    def test_transfer_channel_dominates_impact(self, lab):
        res = transfer_experiment(lab)
        dec = decompose_household_response(lab, res["baseline"], "C")
        impact = {k: v[0] for k, v in dec.contributions.items()}
        assert impact["transfers"] > 0
        assert impact["transfers"] > max(
            abs(v) for k, v in impact.items() if k != "transfers")

    def test_inflation_decomposition_additivity(self, lab):
        bank = ImpulseBank(lab.economy())
        rng = np.random.default_rng(0)
        eps = 0.01 * rng.standard_normal((10, 5))
        shocks = ShockSeries([f"q{t}" for t in range(10)], eps, np.zeros(lab.T))
        dec = decompose_inflation_by_shock(bank, shocks)
        assert dec.additivity_gap() < 1e-9


class TestCounterfactual:
    def test_identical_kernels_identical_paths(self, lab):
        bank = ImpulseBank(lab.economy())
        rng = np.random.default_rng(1)
        eps = 0.01 * rng.standard_normal((8, 5))
        shocks = ShockSeries([f"q{t}" for t in range(8)], eps, np.zeros(lab.T))
        plain = counterfactual_propagation(bank, shocks, {}, variables=("pi",))
        same = counterfactual_propagation(bank, shocks, {"T": bank},
                                          variables=("pi",))
        assert np.allclose(plain["pi"], same["pi"], atol=1e-14)

    def test_integrated_kernels_lower_inflation_while_debt_high(self, lab):
        bank = ImpulseBank(lab.economy())
        bank_alt = ImpulseBank(lab.economy(Psi=0.0))
        T_obs = 6
        eps = np.zeros((T_obs, 5))
        eps[0, SHOCK_NAMES.index("T")] = 0.02 * lab.ss.quantities["Y"]
        shocks = ShockSeries([f"q{t}" for t in range(T_obs)], eps, np.zeros(lab.T))
        base = counterfactual_propagation(bank, shocks, {}, variables=("pi", "Bg"))
        cf = counterfactual_propagation(bank, shocks, {"T": bank_alt},
                                        variables=("pi", "Bg"))
        gap = base["pi"] - cf["pi"]
        debt_high = base["Bg"] > 0.2 * base["Bg"].max()
        late = np.arange(lab.T) >= 4
        assert np.all(gap[debt_high & late] > 0)


class TestAltRules:
    def test_debt_adjusted_rule_shrinks_gap(self, lab, theta_B):
        res = transfer_experiment(lab)
        ge = lab.economy()
        assert theta_B == pytest.approx(0.0047, abs=0.002)  # reference value
        nu = alt_rule_news(ge, res["baseline"], "debt_adjusted", theta_B=theta_B)
        adjusted = apply_news_bundle(ge, res["baseline"], nu,
                                     variables=("pi", "rr", "Y", "Bg"))
        gap_base = np.max(np.abs(res["baseline"]["pi"] - res["alt"]["pi"]))
        gap_adj = np.max(np.abs(adjusted["pi"] - res["alt"]["pi"]))
        assert gap_adj < 0.25 * gap_base

    def test_rule_residual_zero_after_switch(self, lab):
        res = transfer_experiment(lab)
        ge = lab.economy()
        from hank2a.scenarios import _rule_residual, _RULE_VARS
        nu = alt_rule_news(ge, res["baseline"], "hawkish", switch_date=5)
        newp = apply_news_bundle(ge, res["baseline"], nu, switch_date=5,
                                 variables=_RULE_VARS)
        resid = _rule_residual("hawkish", newp, ge, 2.5, 0.0)
        assert np.max(np.abs(resid[5:])) < 1e-9
        # pre-switch outcomes untouched
        assert np.allclose(newp["pi"][:5], res["baseline"]["pi"][:5], atol=1e-14)

    def test_difference_rule_persistence_equivalence(self, lab):
        """The difference rule equals the persistence form with slope
        theta_pi/(1-rho_R); both parameterizations give identical news."""
        res = transfer_experiment(lab)
        ge = lab.economy()
        from hank2a.scenarios import _rule_residual
        rho = ge.macro.rho_R
        theta = 1.5
        dev = {v: res["baseline"][v] for v in ("rr", "pi", "Y", "Bg")}
        r1 = _rule_residual("difference", dev, ge, theta, 0.0)
        # persistence form: drr - rho*drr_lag - (1-rho)*(drr_lag + 7.5*dpi)
        R = 1.0 + ge.ssq["r_R"]
        drr = dev["rr"] / R
        lag = np.concatenate([[0.0], drr[:-1]])
        r2 = drr - rho * lag - (1.0 - rho) * (lag + theta / (1.0 - rho) * dev["pi"])
        assert np.max(np.abs(r1 - r2)) < 1e-15

    def test_misunderstood_rule_replicates_rate_path(self, lab):
        res = transfer_experiment(lab)
        ge = lab.economy()
        nu = alt_rule_news(ge, res["baseline"], "debt_adjusted", theta_B=0.0047)
        understood = apply_news_bundle(ge, res["baseline"], nu)
        mis, eps = misunderstood_rule(ge, res["baseline"], understood["rr"])
        assert np.max(np.abs(mis["rr"] - understood["rr"])) < 1e-9
        # zero target gap means zero surprises
        same, eps0 = misunderstood_rule(ge, res["baseline"], res["baseline"]["rr"])
        assert np.allclose(eps0, 0.0, atol=1e-12)

    def test_misunderstood_more_persistent_inflation(self, lab):
        res = transfer_experiment(lab)
        ge = lab.economy()
        nu = alt_rule_news(ge, res["baseline"], "debt_adjusted", theta_B=0.0047)
        understood = apply_news_bundle(ge, res["baseline"], nu)
        mis, _ = misunderstood_rule(ge, res["baseline"], understood["rr"])
        h = slice(8, 40)
        assert np.mean(mis["pi"][h]) > np.mean(understood["pi"][h])


class TestPiTilde:
    def test_steady_debt_gives_target(self, lab):
        ge = lab.economy()
        paths = {"pi": np.zeros(lab.T), "Bg": np.zeros(lab.T), "Y": np.zeros(lab.T)}
        out = pi_tilde_comparison(ge, paths, theta_B=0.0047)
        assert np.allclose(out["formula"], 0.0, atol=1e-14)

    def test_magnitudes_and_medium_term_overprediction(self, lab, theta_B):
        res = transfer_experiment(lab)
        ge = lab.economy()
        out = pi_tilde_comparison(ge, res["baseline"], theta_B=theta_B)
        m = np.mean(out["model"][8:40])
        f = np.mean(out["formula"][8:40])
        # same order once the direct transfer impulse has passed, with the
        # formula over-predicting medium-term inflation
        assert m / 3 < f < 3 * m
        assert f > m


class TestSweep:
    def test_single_point_grid(self, lab):
        rows = fiscal_rule_sweep(lab, [0.94], [0.5], horizon=30)
        assert len(rows) == 1
        assert rows[0]["baseline_stable"]
        assert rows[0]["baseline_cum_inflation_pp"] > rows[0]["alt_cum_inflation_pp"]

    def test_debt_persistence_association(self, lab):
        rows = fiscal_rule_sweep(lab, [0.9, 0.97], [0.5], horizon=30)
        lo, hi = rows[0], rows[1]
        assert hi["baseline_mean_debt_pp"] > lo["baseline_mean_debt_pp"]
        assert hi["baseline_cum_inflation_pp"] > lo["baseline_cum_inflation_pp"]
