"""Least-squares extraction of Drude parameters from infrared optical data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from casimir.constants import CODATA2018
from casimir.dielectric import DrudeParams, OpticalTable
from casimir.errors import ConvergenceError, InputError

WEIGHT_POLICIES = ("relerr", "uniform")


@dataclass(frozen=True)
class FitWindow:
    """Wavelength window (m) of samples used in the fit."""

    lambda_min: float = 2e-6
    lambda_max: float = math.inf

    def __post_init__(self):
        if not (0 < self.lambda_min < self.lambda_max):
            raise InputError("fit window needs 0 < lambda_min < lambda_max")

    def mask(self, omega, c=CODATA2018.c):
        lam = 2 * np.pi * c / np.asarray(omega)
        return (lam >= self.lambda_min) & (lam <= self.lambda_max)


@dataclass(frozen=True)
class FitResult:
    params: DrudeParams
    sigma_omega_p: float
    sigma_omega_tau: float
    residual_norm: float
    n_points_used: int
    weighting: str
    iterations: int

    def rho_0(self, eps_0=CODATA2018.eps_0):
        return self.params.rho_0(eps_0)


def _model(theta, omega):
    """Drude eps and its derivatives with respect to (ln omega_p, ln omega_tau)."""
    wp, wt = np.exp(theta)
    d = omega * (omega + 1j * wt)
    eps = 1 - wp**2 / d
    d_lnwp = -2 * wp**2 / d
    d_lnwt = 1j * omega * wt * wp**2 / d**2
    return eps, d_lnwp, d_lnwt


def _residuals(theta, omega, eps_data, scale_re, scale_im):
    eps, j1, j2 = _model(theta, omega)
    r = np.concatenate([(eps.real - eps_data.real) / scale_re,
                        (eps.imag - eps_data.imag) / scale_im])
    jac = np.column_stack([
        np.concatenate([j1.real / scale_re, j1.imag / scale_im]),
        np.concatenate([j2.real / scale_re, j2.imag / scale_im]),
    ])
    return r, jac


def _initial_guess(omega, eps_im):
    wt = math.exp(np.mean(np.log(omega)))
    w0, im0 = omega[0], eps_im[0]
    wp2 = im0 * w0 * (w0**2 + wt**2) / wt
    if not wp2 > 0:
        raise InputError("lowest in-window Im eps must be > 0 to start the fit")
    return np.log([math.sqrt(wp2), wt])


def fit_drude(t: OpticalTable, w: FitWindow = FitWindow(), weighting: str = "relerr",
              max_iter=200, step_tol=1e-10, obj_tol=1e-12) -> FitResult:
    """Fit eps(omega) = 1 - wp^2 / (w (w + i wt)) to in-window samples.

    Residuals are relative. With ``relerr`` each of Re and Im is scaled by
    its own magnitude; with ``uniform`` both components of a sample are
    scaled by |eps|. The minimiser is Levenberg-Marquardt in log-parameters
    with the analytic Jacobian; sigmas come from ``s^2 (J^T J)^-1`` at the
    minimum with ``s^2 = SSR / (m - 2)``.
    """
    if weighting not in WEIGHT_POLICIES:
        raise InputError(f"unknown weighting {weighting!r}; choose from {WEIGHT_POLICIES}")
    sel = w.mask(t.omega)
    n = int(sel.sum())
    if n < 3:
        raise InputError(f"only {n} samples inside the fit window, need at least 3")
    omega = t.omega[sel]
    eps_data = t.eps[sel]
    if weighting == "relerr":
        scale_re, scale_im = np.abs(eps_data.real), np.abs(eps_data.imag)
    else:
        scale_re = scale_im = np.abs(eps_data)
    if np.any(scale_re == 0) or np.any(scale_im == 0):
        raise InputError("zero-valued eps component inside the fit window")

    theta = _initial_guess(omega, eps_data.imag)
    r, jac = _residuals(theta, omega, eps_data, scale_re, scale_im)
    cost = r @ r
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        jtj = jac.T @ jac
        g = jac.T @ r
        diag = np.diag(np.diag(jtj))
        try:
            step = -np.linalg.solve(jtj + lam * diag, g)
        except np.linalg.LinAlgError:
            lam *= 10
            continue
        trial = theta + step
        r_new, jac_new = _residuals(trial, omega, eps_data, scale_re, scale_im)
        cost_new = r_new @ r_new
        if np.isfinite(cost_new) and cost_new <= cost:
            decrease = (cost - cost_new) / cost if cost > 0 else 0.0
            theta, r, jac, cost = trial, r_new, jac_new, cost_new
            lam = max(lam / 10, 1e-15)
            # theta is log-parameters, so the step is already relative
            if np.max(np.abs(step)) < step_tol or decrease < obj_tol or cost == 0:
                converged = True
                break
        else:
            lam *= 10
            if lam > 1e16:
                # no downhill direction left at machine precision
                converged = True
                break
    params = DrudeParams(*(float(v) for v in np.exp(theta)))
    if not converged:
        raise ConvergenceError(f"Drude fit did not converge in {max_iter} iterations",
                               best=params)

    m = r.size
    dof = m - 2
    s2 = cost / dof if dof > 0 else 0.0
    try:
        cov = s2 * np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        cov = np.full((2, 2), np.nan)
    sig = np.sqrt(np.maximum(np.diag(cov), 0))
    return FitResult(
        params=params,
        sigma_omega_p=float(params.omega_p * sig[0]),
        sigma_omega_tau=float(params.omega_tau * sig[1]),
        residual_norm=float(math.sqrt(cost / m)),
        n_points_used=n,
        weighting=weighting,
        iterations=it,
    )
