import numpy as np
import pytest

from hank2a.grids import build_grid, liquid_grid
from hank2a.household import HouseholdModel, HouseholdParams, Prices, solve_stationary_policies, stationary_distribution
from hank2a.income import SkillSpec, build_income_chain


def small_household(n_a=28, n_k=20, n_s=4, lam=0.05, zeta=0.02):
    chain = build_income_chain(SkillSpec(rho_s=0.96, sigma_s=0.15, n_s=n_s), zeta=zeta, iota=0.0625)
    params = HouseholdParams(
        beta=0.9838, xi=1.5, gamma=1.0, varsigma=1.0, lam=lam,
        a_lower=-1.45, R_bar=0.0355, tau_w=0.2, tau_p=0.12, tau_Xi=0.24,
    )
    a_grid = liquid_grid(params.a_lower, 120.0, n_a)
    k_grid = build_grid(0.0, 250.0, n_k)
    return HouseholdModel(params, chain, a_grid, k_grid)


def small_prices(**kw):
    base = dict(r_l=0.0, r_k=0.0092, q=1.0, w=1.95, N=1.0, T=0.0,
                tau_level=1.0, Pi=0.30, A=1.0)
    base.update(kw)
    return Prices(**base)


@pytest.fixture(scope="session")
def hh_model():
    return small_household()


@pytest.fixture(scope="session")
def hh_prices():
    return small_prices()


@pytest.fixture(scope="session")
def hh_solution(hh_model, hh_prices):
    pols = solve_stationary_policies(hh_model, hh_prices, tol=1e-11)
    D = stationary_distribution(hh_model, pols, tol=1e-13)
    return pols, D
