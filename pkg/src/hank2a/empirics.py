"""Observable construction from raw quarterly series and local projections.

Raw inputs are FRED-style quarterly series supplied by the user as CSV (wide
format, one `date` column like 2014Q1). Targets for the filtering exercise
are relative deviations from linear pre-pandemic trends; inflation and the
policy rate are demeaned over the trend window so that they line up with the
model's zero-inflation steady state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .filters import OBSERVABLES, ObservableSet

__all__ = ["RawSeriesBundle", "LPResult", "build_observables",
           "domestic_debt_value", "local_projection", "OUTPUT_COMPONENTS",
           "TRANSFER_COMPONENTS"]

OUTPUT_COMPONENTS = ("PCND", "PCDG", "PCESV", "GPDI", "GCE")
TRANSFER_COMPONENTS = ("B087RC1Q027SBEA", "FGSL")


def _parse_quarter(s: str) -> pd.Period:
    return pd.Period(str(s).replace("-", ""), freq="Q")


@dataclass
class RawSeriesBundle:
    frame: pd.DataFrame   # PeriodIndex (quarterly), one column per series

    @classmethod
    def from_csv(cls, path) -> "RawSeriesBundle":
        df = pd.read_csv(path)
        if "date" not in df.columns:
            raise ValueError("raw series CSV needs a 'date' column like 2014Q1")
        df.index = pd.PeriodIndex([_parse_quarter(d) for d in df["date"]], freq="Q")
        df = df.drop(columns=["date"]).astype(float)
        return cls(df)

    def require(self, *names: str) -> None:
        missing = [n for n in names if n not in self.frame.columns]
        if missing:
            raise ValueError(f"missing raw series: {', '.join(missing)}")

    def col(self, name: str) -> pd.Series:
        self.require(name)
        return self.frame[name]


def _linear_trend(series: pd.Series, window: tuple[str, str]) -> pd.Series:
    lo, hi = (_parse_quarter(w) for w in window)
    sub = series[(series.index >= lo) & (series.index <= hi)]
    if len(sub) < 2:
        raise ValueError(f"trend window {window} has fewer than 2 observations")
    x = np.array([(p - series.index[0]).n for p in sub.index], dtype=float)
    coef = np.polyfit(x, sub.values, 1)
    x_all = np.array([(p - series.index[0]).n for p in series.index], dtype=float)
    return pd.Series(np.polyval(coef, x_all), index=series.index)


def build_observables(raw: RawSeriesBundle,
                      trend_window: tuple[str, str] = ("2014Q1", "2019Q4"),
                      sample: tuple[str, str] = ("2020Q1", "2024Q2")) -> ObservableSet:
    """Deflated per-capita targets as deviations from pre-sample trends."""
    raw.require(*OUTPUT_COMPONENTS, *TRANSFER_COMPONENTS, "GDPDEF", "CNP16OV",
                "FEDFUNDS")
    defl = raw.col("GDPDEF")
    pop = raw.col("CNP16OV")
    if (defl <= 0).any() or (pop <= 0).any():
        raise ValueError("deflator and population must be strictly positive")
    output = sum(raw.col(c) for c in OUTPUT_COMPONENTS) / defl / pop
    invest = raw.col("GPDI") / defl / pop
    transfers = sum(raw.col(c) for c in TRANSFER_COMPONENTS) / defl / pop
    infl = defl / defl.shift(1)
    rate = raw.col("FEDFUNDS") / 400.0

    y_trend = _linear_trend(output, trend_window)
    i_trend = _linear_trend(invest, trend_window)
    t_trend = _linear_trend(transfers, trend_window)
    lo, hi = (_parse_quarter(w) for w in trend_window)
    win = (infl.index >= lo) & (infl.index <= hi)

    table = pd.DataFrame(index=output.index)
    table["dY"] = (output - y_trend) / y_trend
    table["dI"] = (invest - i_trend) / i_trend
    table["pi"] = infl - infl[win].mean()
    table["rR"] = rate - rate[win].mean()
    table["dT"] = (transfers - t_trend) / y_trend

    s_lo, s_hi = (_parse_quarter(w) for w in sample)
    table = table[(table.index >= s_lo) & (table.index <= s_hi)]
    if table.isna().any().any():
        raise ValueError("sample window contains missing values")
    dates = [str(p) for p in table.index]
    return ObservableSet(dates, table[list(OBSERVABLES)].values)


def domestic_debt_value(raw: RawSeriesBundle) -> pd.Series:
    """Market value of domestically held treasury debt net of federal deposits."""
    raw.require("FDHBFIN", "FYGFDPUN", "MVMTD027MNFRBDAL", "FL313020005Q")
    s_f = raw.col("FDHBFIN") / raw.col("FYGFDPUN")
    return (1.0 - s_f) * raw.col("MVMTD027MNFRBDAL") - raw.col("FL313020005Q")


# ---------------------------------------------------------------------------
# local projections
# ---------------------------------------------------------------------------

@dataclass
class LPResult:
    horizon: int
    beta: float
    se: float
    band68: tuple[float, float]
    band90: tuple[float, float]
    nobs: int


def local_projection(y: np.ndarray, B: np.ndarray,
                     controls: dict[str, np.ndarray] | None = None,
                     horizons: int = 12, lags: int = 4,
                     trend: bool = True) -> list[LPResult]:
    """Horizon-by-horizon regressions of y_{t+h} on B_t with lagged controls.

    Controls enter with `lags` lags (dated t-1 back to t-lags), as do the
    dependent variable and the impulse variable themselves. Standard errors
    are heteroskedasticity-robust (HC1); bands use 1.0 and 1.645 multiples.
    """
    y = np.asarray(y, dtype=float)
    B = np.asarray(B, dtype=float)
    if y.shape != B.shape:
        raise ValueError("y and B must be equally long")
    controls = dict(controls or {})
    controls.setdefault("_y", y)
    controls.setdefault("_B", B)
    n = len(y)
    start = lags
    results = []
    for h in range(horizons + 1):
        rows = np.arange(start, n - h)
        cols = [np.ones(len(rows))]
        names = ["const"]
        if trend:
            cols.append(rows.astype(float))
            names.append("trend")
        cols.append(B[rows])
        names.append("B")
        for cname, series in controls.items():
            series = np.asarray(series, dtype=float)
            for L in range(1, lags + 1):
                cols.append(series[rows - L])
                names.append(f"{cname}_l{L}")
        X = np.column_stack(cols)
        yy = y[rows + h]
        XtX = X.T @ X
        rank = np.linalg.matrix_rank(XtX)
        if rank < X.shape[1]:
            raise ValueError(
                f"rank-deficient regressor set at horizon {h}: "
                f"{X.shape[1]} regressors, rank {rank} ({', '.join(names)})")
        XtX_inv = np.linalg.inv(XtX)
        beta_hat = XtX_inv @ (X.T @ yy)
        resid = yy - X @ beta_hat
        nobs, k = X.shape
        meat = (X * resid[:, None] ** 2).T @ X
        V = XtX_inv @ meat @ XtX_inv * nobs / max(nobs - k, 1)
        j = names.index("B")
        b = float(beta_hat[j])
        se = float(np.sqrt(max(V[j, j], 0.0)))
        results.append(LPResult(
            horizon=h, beta=b, se=se,
            band68=(b - se, b + se),
            band90=(b - 1.645 * se, b + 1.645 * se),
            nobs=nobs,
        ))
    return results
