"""Two-period insurance economy: closed forms, natural rate, period-0 inflation.

All rates are net and quarterly unless stated otherwise; inflation is gross.
The economy has ex-ante identical households that face a single productivity
draw between periods 0 and 1 (high z_h with prob rho_h, else z_l), a Rotemberg
price setter, a Taylor rule i_{t+1} = r*_t + theta_pi*(pi_t - 1), and a fiscal
authority that issues debt b_g0 in period 0 and repays it with a
productivity-proportional tax in period 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "AnalyticParams",
    "AnalyticSteadyState",
    "Inflation0Result",
    "BracketingError",
    "steady_state",
    "natural_rate",
    "natural_rate_zero_debt",
    "natural_rate_sensitivity",
    "solve_inflation0",
    "implicit_target",
    "debt_grid_table",
]

RESID_TOL = 1e-10
MAX_ITER = 200


class BracketingError(RuntimeError):
    """Raised when a residual function has no sign change on the search interval."""


@dataclass(frozen=True)
class AnalyticParams:
    beta: float = 0.96
    gamma: float = 1.0
    epsilon: float = 6.0
    phi: float = 100.0
    theta_pi: float = 1.5
    rho_h: float = 0.5
    z_h: float = 1.25
    z_l: float = 0.75
    b_g0: float = 0.0
    r_star0: float | None = None   # None: use natural_rate at b_g0

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0,1), got {self.beta}")
        if self.z_l <= 0.0:
            raise ValueError(f"z_l must be positive, got {self.z_l}")
        if self.epsilon <= 1.0:
            raise ValueError(f"epsilon must exceed 1, got {self.epsilon}")
        if not 0.0 < self.rho_h < 1.0:
            raise ValueError(f"rho_h must be in (0,1), got {self.rho_h}")
        zbar = self.rho_h * self.z_h + (1.0 - self.rho_h) * self.z_l
        if abs(zbar - 1.0) > 1e-12:
            raise ValueError(
                f"productivity draws must average to 1: rho_h*z_h+(1-rho_h)*z_l = {zbar!r}"
            )
        if self.b_g0 < 0.0:
            raise ValueError(f"b_g0 must be nonnegative, got {self.b_g0}")

    @property
    def w_ss(self) -> float:
        return (self.epsilon - 1.0) / self.epsilon

    @property
    def i_ss(self) -> float:
        return (1.0 - self.beta) / self.beta

    @property
    def b_max(self) -> float:
        """Upper end of the debt domain on which comparative statics are valid."""
        return self.w_ss * self.beta / (1.0 - self.beta)


@dataclass(frozen=True)
class AnalyticSteadyState:
    pi_ss: float
    w_ss: float
    i_ss: float
    N_ss: float
    c_h: float
    c_l: float
    N_h: float
    N_l: float


@dataclass(frozen=True)
class Inflation0Result:
    pi_0: float
    w_0: float
    Y_0: float
    c_0: float
    residual: float


def _bracketed_root(f, lo, hi, tol=RESID_TOL, maxit=MAX_ITER, label=""):
    """Bisection with a safeguarded secant step; stops on |f| < tol."""
    flo, fhi = f(lo), f(hi)
    if abs(flo) < tol:
        return lo
    if abs(fhi) < tol:
        return hi
    if np.sign(flo) == np.sign(fhi):
        xs = np.linspace(lo, hi, 9)
        sample = ", ".join(f"f({x:.6g})={f(x):.3e}" for x in xs)
        raise BracketingError(
            f"no sign change for {label or 'residual'} on [{lo:.6g}, {hi:.6g}]: {sample}"
        )
    a, b, fa, fb = lo, hi, flo, fhi
    x, fx = a, fa
    for it in range(maxit):
        # alternate secant with bisection so steep/singular flanks cannot stall
        if it % 2 == 0 or fb == fa:
            x = 0.5 * (a + b)
        else:
            x_sec = b - fb * (b - a) / (fb - fa)
            x = x_sec if a < x_sec < b else 0.5 * (a + b)
        fx = f(x)
        if abs(fx) < tol:
            return x
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
    raise RuntimeError(
        f"root finder for {label or 'residual'} hit {maxit} iterations; last |f|={abs(fx):.3e}"
    )


def _rn_residual(p: AnalyticParams, r: float, b: float) -> float:
    """Residual of the natural-rate condition at net rate r and debt b."""
    kap = 1.0 - p.beta   # i_ss/(1+i_ss)
    R = 1.0 + r
    den_h = p.w_ss * p.z_h + kap * R * b * (1.0 - p.z_h)
    den_l = p.w_ss * p.z_l + kap * R * b * (1.0 - p.z_l)
    rhs = p.beta * (p.rho_h * R / den_h + (1.0 - p.rho_h) * R / den_l)
    return rhs - p.epsilon / (p.epsilon - 1.0)


def natural_rate_zero_debt(p: AnalyticParams) -> float:
    """Closed-form natural rate at b_g0 = 0 (harmonic-mean productivity)."""
    hm = p.rho_h / p.z_h + (1.0 - p.rho_h) / p.z_l
    return 1.0 / (p.beta * hm) - 1.0


def natural_rate(p: AnalyticParams) -> float:
    """Net rate r_n0 at which period-0 inflation is exactly 1."""
    b = p.b_g0
    if b == 0.0:
        return natural_rate_zero_debt(p)
    r0 = natural_rate_zero_debt(p)
    lo, hi = r0 - 0.05, p.i_ss + 0.05
    return _bracketed_root(lambda r: _rn_residual(p, r, b), lo, hi, label="natural rate")


def natural_rate_sensitivity(p: AnalyticParams) -> float:
    """d r_n0 / d b_g0 by the implicit-function theorem; positive on the domain."""
    if not 0.0 <= p.b_g0 < p.b_max:
        raise ValueError(
            f"b_g0={p.b_g0} outside the comparative-statics domain [0, {p.b_max:.6g})"
        )
    if p.z_h == p.z_l == 1.0:
        return 0.0
    kap = 1.0 - p.beta
    R = 1.0 + natural_rate(p)
    den_h = p.w_ss * p.z_h + kap * R * p.b_g0 * (1.0 - p.z_h)
    den_l = p.w_ss * p.z_l + kap * R * p.b_g0 * (1.0 - p.z_l)
    dF_db = p.beta * (
        p.rho_h * kap * R**2 * (p.z_h - 1.0) / den_h**2
        + (1.0 - p.rho_h) * kap * R**2 * (p.z_l - 1.0) / den_l**2
    )
    dF_dr = p.beta * (
        p.rho_h * p.w_ss * p.z_h / den_h**2
        + (1.0 - p.rho_h) * p.w_ss * p.z_l / den_l**2
    )
    return -dF_db / dF_dr


def _pi0_residual(p: AnalyticParams, pi: float, r_star0: float) -> float:
    """Residual of the period-0 inflation condition at gross inflation pi."""
    kap = 1.0 - p.beta
    R1 = 1.0 + r_star0 + p.theta_pi * (pi - 1.0)
    den_h = p.w_ss * p.z_h + kap * R1 * p.b_g0 * (1.0 - p.z_h)
    den_l = p.w_ss * p.z_l + kap * R1 * p.b_g0 * (1.0 - p.z_l)
    rhs = p.beta * (p.rho_h * R1 / den_h + (1.0 - p.rho_h) * R1 / den_l)
    lhs = p.epsilon / (p.epsilon - 1.0 + p.phi * (pi - 1.0) * pi)
    return rhs - lhs


def solve_inflation0(p: AnalyticParams) -> Inflation0Result:
    """Period-0 gross inflation plus the implied wage, output and consumption."""
    r_star0 = p.r_star0 if p.r_star0 is not None else natural_rate(p)
    f = lambda pi: _pi0_residual(p, pi, r_star0)
    # w_0 > 0 requires epsilon-1+phi*(pi-1)*pi > 0; stay on that branch
    lo = 0.5
    if p.phi > 0.0:
        disc = 1.0 - 4.0 * (p.epsilon - 1.0) / p.phi
        if disc >= 0.0:
            lo = max(lo, 0.5 * (1.0 + np.sqrt(disc)) + 1e-9)
    pi0 = _bracketed_root(f, lo, 2.0, label="period-0 inflation")
    w0 = (p.phi * (pi0 - 1.0) * pi0 + p.epsilon - 1.0) / p.epsilon
    Y0 = 1.0 / (1.0 + p.gamma)
    return Inflation0Result(pi_0=pi0, w_0=w0, Y_0=Y0, c_0=w0 * Y0, residual=f(pi0))


def steady_state(p: AnalyticParams, pi_0: float | None = None) -> AnalyticSteadyState:
    """Post-period-1 equilibrium objects; type policies depend on the period-0 rate."""
    if pi_0 is None:
        pi_0 = solve_inflation0(p).pi_0
    r_star0 = p.r_star0 if p.r_star0 is not None else natural_rate(p)
    i1 = r_star0 + p.theta_pi * (pi_0 - 1.0)
    kap = 1.0 - p.beta
    g = p.gamma
    b = p.b_g0
    # tau_1 = (1+i_1) b_g0, so the insurance transfer to type i is (1+i_1) b (1-z_i)
    def c_i(z):
        return (p.w_ss * z + kap * (1.0 + i1) * b * (1.0 - z)) / (1.0 + g)

    def n_i(z):
        return (p.w_ss * z - g * kap * (1.0 + i1) * b * (1.0 - z)) / ((1.0 + g) * p.w_ss * z)

    return AnalyticSteadyState(
        pi_ss=1.0,
        w_ss=p.w_ss,
        i_ss=p.i_ss,
        N_ss=1.0 / (1.0 + g),
        c_h=c_i(p.z_h),
        c_l=c_i(p.z_l),
        N_h=n_i(p.z_h),
        N_l=n_i(p.z_l),
    )


def implicit_target(R_star: float, pi_star: float, theta_pi: float, R_tilde: float) -> float:
    """Gross implicit inflation target when the rule intercept lags the true natural rate."""
    if theta_pi <= max(R_star, R_tilde):
        raise ValueError(
            f"theta_pi={theta_pi} must exceed both gross rates ({R_star}, {R_tilde})"
        )
    return pi_star * (theta_pi - R_star) / (theta_pi - R_tilde)


def debt_grid_table(p: AnalyticParams, b_grid) -> np.ndarray:
    """Rows of (b_g0, r_n0, pi_0, dr_db) over a debt grid, with r*_0 held fixed."""
    r_star0 = p.r_star0 if p.r_star0 is not None else natural_rate(p)
    rows = []
    for b in np.asarray(b_grid, dtype=float):
        pb = replace(p, b_g0=float(b), r_star0=r_star0)
        rows.append(
            [b, natural_rate(pb), solve_inflation0(pb).pi_0, natural_rate_sensitivity(pb)]
        )
    return np.array(rows)
