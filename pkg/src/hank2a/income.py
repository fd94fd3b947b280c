"""Idiosyncratic income states: discretized skill chain plus entrepreneur status.

Workers carry a persistent log-productivity state discretized on n_s points;
with probability zeta they become entrepreneurs (last state), who receive
profit income instead of wages and revert to a worker state drawn from the
skill chain's ergodic distribution with probability iota.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

__all__ = ["SkillSpec", "IncomeChain", "tauchen", "ergodic_distribution", "extend_with_entrepreneur", "build_income_chain"]


@dataclass(frozen=True)
class SkillSpec:
    rho_s: float = 0.98
    sigma_s: float = 0.12
    n_s: int = 17
    width: float = 3.0   # grid half-width in unconditional std deviations

    def __post_init__(self):
        if not 0.0 <= self.rho_s < 1.0:
            raise ValueError(f"rho_s must be in [0,1), got {self.rho_s}")
        if self.sigma_s <= 0.0:
            raise ValueError(f"sigma_s must be positive, got {self.sigma_s}")
        if self.n_s < 2:
            raise ValueError(f"need at least 2 skill points, got {self.n_s}")


@dataclass(frozen=True)
class IncomeChain:
    """Skill states with an appended entrepreneur state (index n_s)."""

    skill_values: np.ndarray        # (n_s,) productivity levels, ergodic mean 1
    transition: np.ndarray          # (n_s+1, n_s+1) row-stochastic
    ergodic: np.ndarray             # (n_s+1,) stationary distribution
    skill_transition: np.ndarray    # (n_s, n_s) worker-only chain
    skill_ergodic: np.ndarray       # (n_s,) its stationary distribution
    zeta: float
    iota: float

    @property
    def n_states(self) -> int:
        return self.transition.shape[0]

    @property
    def ent_index(self) -> int:
        return self.n_states - 1

    @property
    def ent_mass(self) -> float:
        return self.zeta / (self.zeta + self.iota) if (self.zeta + self.iota) > 0 else 0.0

    @property
    def state_values(self) -> np.ndarray:
        """Productivity per state; the entrepreneur supplies no market labor."""
        return np.concatenate([self.skill_values, [0.0]])

    def worker_moment(self, power: float) -> float:
        """Population integral of s**power over worker states (entrepreneurs excluded)."""
        return float(np.sum(self.ergodic[:-1] * self.skill_values**power))


def tauchen(spec: SkillSpec) -> tuple[np.ndarray, np.ndarray]:
    """Discretize log s' = rho*log s + eps on an equispaced grid via normal CDFs.

    Returns productivity levels normalized to ergodic mean one, and the
    row-stochastic transition matrix.
    """
    n, rho, sig = spec.n_s, spec.rho_s, spec.sigma_s
    sig_unc = sig / np.sqrt(1.0 - rho**2)
    y = np.linspace(-spec.width * sig_unc, spec.width * sig_unc, n)
    step = y[1] - y[0]
    z = (y[None, :] - rho * y[:, None]) / sig
    half = 0.5 * step / sig
    P = norm.cdf(z + half) - norm.cdf(z - half)
    P[:, 0] = norm.cdf(z[:, 0] + half)
    P[:, -1] = 1.0 - norm.cdf(z[:, -1] - half)
    P /= P.sum(axis=1, keepdims=True)
    levels = np.exp(y)
    erg = ergodic_distribution(P)
    levels = levels / np.sum(erg * levels)
    return levels, P


def ergodic_distribution(P: np.ndarray, tol: float = 1e-12, maxit: int = 200_000) -> np.ndarray:
    """Stationary distribution by power iteration, dense eigensolve fallback."""
    n = P.shape[0]
    d = np.full(n, 1.0 / n)
    for _ in range(maxit):
        d_new = d @ P
        if np.max(np.abs(d_new - d)) < tol:
            return d_new / d_new.sum()
        d = d_new
    if n <= 64:
        vals, vecs = np.linalg.eig(P.T)
        i = np.argmin(np.abs(vals - 1.0))
        d = np.real(vecs[:, i])
        d = d / d.sum()
        if np.min(d) > -1e-12:
            return np.clip(d, 0.0, None) / np.clip(d, 0.0, None).sum()
    raise RuntimeError("ergodic distribution did not converge")


def extend_with_entrepreneur(
    skill_values: np.ndarray, skill_P: np.ndarray, zeta: float, iota: float
) -> IncomeChain:
    """Append the entrepreneur state with exogenous entry/exit probabilities."""
    if not (0.0 <= zeta < 1.0 and 0.0 < iota < 1.0):
        raise ValueError(f"need 0 <= zeta < 1 and 0 < iota < 1, got zeta={zeta}, iota={iota}")
    n = len(skill_values)
    skill_erg = ergodic_distribution(skill_P)
    P = np.zeros((n + 1, n + 1))
    P[:n, :n] = (1.0 - zeta) * skill_P
    P[:n, n] = zeta
    P[n, :n] = iota * skill_erg
    P[n, n] = 1.0 - iota
    erg = ergodic_distribution(P)
    return IncomeChain(
        skill_values=skill_values,
        transition=P,
        ergodic=erg,
        skill_transition=skill_P,
        skill_ergodic=skill_erg,
        zeta=zeta,
        iota=iota,
    )


def build_income_chain(spec: SkillSpec, zeta: float, iota: float) -> IncomeChain:
    values, P = tauchen(spec)
    return extend_with_entrepreneur(values, P, zeta, iota)
