"""Curve analysis pipeline: smoothing, model fitting and fit diagnostics.

Key-rate-vs-distance series are smoothed with a Savitzky-Golay filter, fitted
to a decaying sigmoid plateau/(1 + exp(rate*(x - midpoint))), and reduced to
a stable-transmission distance via the turning point of the smoothed curve.
Stable distances as a function of burst size are then fitted by a cubic in
log(burst size).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import savgol_filter
from scipy.stats import t as student_t


@dataclass(frozen=True)
class FitDiagnostics:
    r_squared: float
    adjusted_r_squared: float
    ci95_halfwidths: tuple[float, ...]
    residuals: tuple[float, ...]


@dataclass(frozen=True)
class SigmoidFit:
    """Decaying-sigmoid parameters: value plateau, per-km decay rate and the
    half-rate distance (where the model equals plateau/2)."""

    plateau: float
    decay_rate: float
    midpoint_km: float
    diagnostics: FitDiagnostics
    converged: bool = True

    def predict(self, xs) -> np.ndarray:
        return sigmoid_model(np.asarray(xs, dtype=float), self.plateau,
                             self.decay_rate, self.midpoint_km)


@dataclass(frozen=True)
class PolyFit:
    """Polynomial coefficients, highest power first."""

    coefficients: tuple[float, ...]
    diagnostics: FitDiagnostics

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def predict(self, xs) -> np.ndarray:
        return np.polyval(self.coefficients, np.asarray(xs, dtype=float))


def sigmoid_model(x, plateau: float, decay_rate: float, midpoint: float):
    """plateau / (1 + exp(decay_rate*(x - midpoint))), overflow-safe."""
    arg = np.clip(decay_rate * (np.asarray(x, dtype=float) - midpoint), -700.0, 700.0)
    return plateau / (1.0 + np.exp(arg))


def savgol_smooth(ys, window: int = 11, polyorder: int = 3) -> np.ndarray:
    """Savitzky-Golay smoothing; length is preserved.

    Each interior point becomes the center value of the least-squares
    polynomial of the given order over its window; edge points are taken
    from the polynomial fitted to the first/last window.  This edge rule
    (rather than mirror padding) keeps the filter exact on polynomials up to
    the fit order over the whole series.
    """
    ys = np.asarray(ys, dtype=float)
    if window % 2 == 0 or window <= polyorder:
        raise ValueError("window must be odd and greater than polyorder")
    if len(ys) < window:
        raise ValueError("series shorter than window")
    return savgol_filter(ys, window, polyorder, mode="interp")


def _sigmoid_jacobian(x, plateau, rate, midpoint) -> np.ndarray:
    arg = np.clip(rate * (x - midpoint), -700.0, 700.0)
    z = np.exp(arg)
    s = 1.0 / (1.0 + z)
    d_plateau = s
    d_rate = -plateau * z * (x - midpoint) * s * s
    d_mid = plateau * z * rate * s * s
    return np.column_stack([d_plateau, d_rate, d_mid])


def _sigmoid_init(x, y) -> tuple[float, float, float]:
    plateau = float(np.max(y))
    half = plateau / 2.0
    idx = int(np.argmin(np.abs(y - half)))
    midpoint = float(x[idx])
    # Slope of the two points bracketing the half-rate crossing; a decaying
    # sigmoid has slope -plateau*rate/4 there.
    lo, hi = max(idx - 1, 0), min(idx + 1, len(x) - 1)
    slope = (y[hi] - y[lo]) / (x[hi] - x[lo]) if x[hi] != x[lo] else 0.0
    rate = -4.0 * slope / plateau if slope < 0 else 0.1
    return plateau, max(rate, 1e-6), midpoint


def fit_sigmoid(xs, ys, max_iter: int = 200, tol: float = 1e-8) -> SigmoidFit:
    """Least-squares decaying-sigmoid fit via damped Gauss-Newton steps.

    Each iteration solves the linearized normal equations and halves the step
    until the residual norm does not increase, so the result never fits worse
    than the initialization.  Convergence is a relative step below tol.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y):
        raise ValueError("xs and ys must have equal length")
    if len(x) < 4:
        raise ValueError("at least 4 points required")
    if np.any(np.diff(x) <= 0):
        raise ValueError("xs must be strictly increasing")
    if np.ptp(y) == 0.0:
        raise ValueError("degenerate data: series is flat")

    theta = np.array(_sigmoid_init(x, y), dtype=float)
    resid = y - sigmoid_model(x, *theta)
    cost = float(resid @ resid)
    converged = False
    for _ in range(max_iter):
        jac = _sigmoid_jacobian(x, *theta)
        jtj = jac.T @ jac
        jtr = jac.T @ resid
        try:
            step = np.linalg.solve(jtj, jtr)
        except np.linalg.LinAlgError:
            break
        scale = 1.0
        for _ in range(60):
            trial = theta + scale * step
            trial_resid = y - sigmoid_model(x, *trial)
            trial_cost = float(trial_resid @ trial_resid)
            if trial_cost <= cost:
                break
            scale *= 0.5
        else:
            break
        rel_step = float(np.max(np.abs(scale * step) / (np.abs(theta) + 1e-12)))
        theta, resid, cost = trial, trial_resid, trial_cost
        if rel_step < tol:
            converged = True
            break

    model = sigmoid_model(x, *theta)
    diag = fit_diagnostics(x, y, model, 3, jacobian=_sigmoid_jacobian(x, *theta))
    return SigmoidFit(float(theta[0]), float(theta[1]), float(theta[2]),
                      diag, converged)


def turning_point(xs, ys, epsilon: float | None = None) -> float:
    """Distance where the curve first leaves its plateau.

    Returns the smallest x whose central-difference derivative is below
    -epsilon and stays below for two consecutive points; falls back to the
    last x when the series never turns.  epsilon defaults to 0.5% of the
    plateau (series maximum) per km.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y):
        raise ValueError("xs and ys must have equal length")
    if len(x) < 3:
        raise ValueError("at least 3 points required")
    if epsilon is None:
        epsilon = 0.005 * float(np.max(y))
    deriv = (y[2:] - y[:-2]) / (x[2:] - x[:-2])  # defined at indices 1..n-2
    below = deriv < -epsilon
    for i in range(len(below) - 1):
        if below[i] and below[i + 1]:
            return float(x[i + 1])
    return float(x[-1])


def plateau_end(xs, ys, fraction: float = 0.95) -> float:
    """Alternative stable-distance measure: first x where the curve drops
    below fraction*plateau (plateau = series maximum)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    threshold = fraction * float(np.max(y))
    for i in range(len(x)):
        if y[i] < threshold:
            return float(x[i])
    return float(x[-1])


def fit_polynomial(xs, ys, degree: int = 3) -> PolyFit:
    """Ordinary least squares polynomial fit via scaled normal equations.

    Design columns are scaled to unit norm before solving, which keeps the
    normal equations well conditioned on natural distance/burst ranges.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if len(x) != len(y):
        raise ValueError("xs and ys must have equal length")
    if len(x) < degree + 2:
        raise ValueError("need more points than coefficients")
    design = np.vander(x, degree + 1)  # highest power first
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("rank-deficient design matrix")
    scaled = design / norms
    gram = scaled.T @ scaled
    if np.linalg.matrix_rank(gram) < degree + 1:
        raise ValueError("rank-deficient design matrix")
    coeffs = np.linalg.solve(gram, scaled.T @ y) / norms
    model = design @ coeffs
    diag = fit_diagnostics(x, y, model, degree + 1, jacobian=design)
    return PolyFit(tuple(float(c) for c in coeffs), diag)


def fit_log_cubic(burst_sizes, stable_distances, log_base: float = 10.0) -> PolyFit:
    """Cubic least squares in log(burst size) against stable distance.

    Coefficients come back highest power first, i.e. the leading entry is
    the signed cubic coefficient.
    """
    b = np.asarray(burst_sizes, dtype=float)
    if np.any(b < 1):
        raise ValueError("burst sizes must be >= 1")
    if log_base <= 1.0:
        raise ValueError("log_base must be > 1")
    x = np.log(b) / math.log(log_base)
    return fit_polynomial(x, stable_distances, degree=3)


def format_fit_report(model: str, param_names, values,
                      diagnostics: FitDiagnostics, n: int) -> str:
    """Structured text block: model, parameters with 95% CI, fit quality."""
    lines = [f"model: {model}", f"n: {n}"]
    for name, value, hw in zip(param_names, values, diagnostics.ci95_halfwidths):
        lines.append(f"{name}: {value:.8g} +- {hw:.4g}")
    lines.append(f"r_squared: {diagnostics.r_squared:.6f}")
    lines.append(f"adjusted_r_squared: {diagnostics.adjusted_r_squared:.6f}")
    return "\n".join(lines) + "\n"


def format_residuals_csv(xs, ys, model_values) -> str:
    """CSV of (x, y, y_model, residual) rows for a fitted curve."""
    lines = ["x,y,y_model,residual"]
    for x, y, m in zip(xs, ys, model_values):
        lines.append(f"{x:.10g},{y:.10g},{m:.10g},{y - m:.10g}")
    return "\n".join(lines) + "\n"


def fit_diagnostics(xs, ys, model_values, n_params: int,
                    jacobian: np.ndarray | None = None) -> FitDiagnostics:
    """R-squared, adjusted R-squared, residuals and 95% parameter confidence
    half-widths from the linearized covariance (when a Jacobian is given)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    m = np.asarray(model_values, dtype=float)
    if not (len(x) == len(y) == len(m)):
        raise ValueError("xs, ys and model_values must have equal length")
    n = len(y)
    if n <= n_params:
        raise ValueError("need more points than parameters")
    resid = y - m
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ValueError("degenerate data: zero variance")
    r2 = 1.0 - ss_res / ss_tot
    dof = n - n_params
    if n - n_params - 1 > 0:
        adj = 1.0 - (1.0 - r2) * (n - 1) / (n - n_params - 1)
    else:
        adj = float("nan")

    ci = (float("nan"),) * n_params
    if jacobian is not None:
        jac = np.asarray(jacobian, dtype=float)
        sigma2 = ss_res / dof
        try:
            cov = sigma2 * np.linalg.inv(jac.T @ jac)
            tq = float(student_t.ppf(0.975, dof))
            ci = tuple(float(tq * math.sqrt(max(v, 0.0))) for v in np.diag(cov))
        except np.linalg.LinAlgError:
            pass
    return FitDiagnostics(r2, adj, ci, tuple(float(r) for r in resid))
