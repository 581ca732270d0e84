"""Dielectric functions on the real and imaginary frequency axes.

Three model kinds feed the force engine: a Drude metal (optionally the
lossless plasma limit), a tabulated optical table continued to the imaginary
axis by the Kramers-Kronig dispersion relation, and an ideal conductor used
for the Casimir limit. All frequencies are angular frequencies in rad/s.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import hyp2f1

from casimir.constants import CODATA2018
from casimir.errors import ExtrapolationError, InputError

__all__ = [
    "DrudeParams", "OpticalTable", "MaterialComposition", "ExtrapolationPolicy",
    "DrudeModel", "TabulatedModel", "IdealMetal",
    "drude_eps_real_axis", "drude_eps_imag_axis", "kk_eps_imag_axis",
    "resistivity_spectrum", "plasma_frequency", "damping_from_resistivity",
    "load_optical_table",
]


@dataclass(frozen=True)
class DrudeParams:
    """Plasma and damping frequencies of a Drude metal.

    ``omega_tau == 0`` is only accepted with ``ideal_plasma=True``; that is
    the lossless plasma model, whose real-axis form has no absorption.
    """

    omega_p: float
    omega_tau: float
    ideal_plasma: bool = False

    def __post_init__(self):
        if not (self.omega_p >= 0 and math.isfinite(self.omega_p)):
            raise InputError(f"omega_p must be finite and >= 0, got {self.omega_p}")
        if self.ideal_plasma:
            if self.omega_tau != 0:
                raise InputError("ideal plasma mode requires omega_tau == 0")
        elif not (self.omega_tau > 0 and math.isfinite(self.omega_tau)):
            raise InputError(f"omega_tau must be > 0, got {self.omega_tau}")

    @classmethod
    def from_resistivity(cls, omega_p, rho_0, eps_0=CODATA2018.eps_0):
        return cls(omega_p, damping_from_resistivity(omega_p, rho_0, eps_0))

    def rho_0(self, eps_0=CODATA2018.eps_0):
        """Static resistivity in Ohm m implied by the parameters."""
        if self.omega_p == 0:
            return math.inf
        return self.omega_tau / (eps_0 * self.omega_p**2)

    def scaled(self, omega_p=1.0, omega_tau=1.0):
        return DrudeParams(self.omega_p * omega_p, self.omega_tau * omega_tau, self.ideal_plasma)


@dataclass(frozen=True)
class MaterialComposition:
    mass_density: float  # kg/m^3
    molar_mass: float  # kg/mol
    electrons_per_atom: float
    effective_mass_ratio: float = 1.0

    def __post_init__(self):
        if self.mass_density <= 0 or self.molar_mass <= 0 or self.effective_mass_ratio <= 0:
            raise InputError("density, molar mass and effective mass must be positive")
        if self.electrons_per_atom < 0:
            raise InputError("electrons_per_atom must be >= 0")


@dataclass(frozen=True)
class ExtrapolationPolicy:
    """Power-law continuation of Im eps outside a table.

    Below the first sample Im eps ~ omega**-low_exponent, above the last
    Im eps ~ omega**-high_exponent. ``None`` sets that tail to zero. The
    defaults are the Drude asymptotes (1/omega and 1/omega**3).
    """

    low_exponent: float | None = 1.0
    high_exponent: float | None = 3.0

    def __post_init__(self):
        if self.low_exponent is not None and self.low_exponent >= 2:
            raise ExtrapolationError(
                f"low-frequency tail omega^-{self.low_exponent} makes the dispersion integral diverge")
        if self.high_exponent is not None and self.high_exponent <= 0:
            raise ExtrapolationError(
                f"high-frequency tail omega^-{self.high_exponent} makes the dispersion integral diverge")

    @property
    def label(self):
        lo = "none" if self.low_exponent is None else f"omega^-{self.low_exponent:g}"
        hi = "none" if self.high_exponent is None else f"omega^-{self.high_exponent:g}"
        return f"low:{lo};high:{hi}"


DRUDE_TAILS = ExtrapolationPolicy()


class OpticalTable:
    """Samples of eps(omega) on the real axis, sorted by frequency.

    Arrays are copied and made read-only on construction.
    """

    def __init__(self, omega, eps_re, eps_im):
        omega = np.array(omega, dtype=float)
        eps_re = np.array(eps_re, dtype=float)
        eps_im = np.array(eps_im, dtype=float)
        if omega.ndim != 1 or omega.shape != eps_re.shape or omega.shape != eps_im.shape:
            raise InputError("optical table columns must be 1-D and of equal length")
        if omega.size < 4:
            raise InputError(f"optical table needs at least 4 samples, got {omega.size}")
        if not np.all(np.isfinite(omega)) or not np.all(np.isfinite(eps_re)) \
                or not np.all(np.isfinite(eps_im)):
            raise InputError("optical table contains non-finite values")
        if np.any(omega <= 0):
            raise InputError("optical table frequencies must be > 0")
        if np.any(np.diff(omega) <= 0):
            raise InputError("optical table frequencies must be strictly increasing")
        if np.any(eps_im < 0):
            bad = np.flatnonzero(eps_im < 0)
            raise InputError(f"negative Im eps at rows {bad.tolist()[:10]}")
        for arr in (omega, eps_re, eps_im):
            arr.flags.writeable = False
        self.omega = omega
        self.eps_re = eps_re
        self.eps_im = eps_im

    def __len__(self):
        return self.omega.size

    @property
    def samples(self):
        return list(zip(self.omega.tolist(), self.eps_re.tolist(), self.eps_im.tolist()))

    @property
    def eps(self):
        return self.eps_re + 1j * self.eps_im

    @classmethod
    def from_unsorted(cls, omega, eps_re, eps_im):
        order = np.argsort(omega, kind="stable")
        return cls(np.asarray(omega)[order], np.asarray(eps_re)[order], np.asarray(eps_im)[order])

    @classmethod
    def from_nk(cls, wavelength, n, k, constants=CODATA2018):
        """Build from wavelength (m) and complex refractive index n + ik."""
        wavelength = np.asarray(wavelength, dtype=float)
        nc = np.asarray(n, dtype=float) + 1j * np.asarray(k, dtype=float)
        eps = nc**2
        omega = 2 * np.pi * constants.c / wavelength
        return cls.from_unsorted(omega, eps.real, eps.imag)

    @classmethod
    def from_drude(cls, params, omega):
        eps = drude_eps_real_axis(params, omega)
        return cls(omega, eps.real, eps.imag)


def load_optical_table(path):
    """Read an optical table CSV.

    Two header layouts are understood: ``omega_rad_s,eps_re,eps_im`` and
    ``lambda_um,n,k``. Lines starting with ``#`` are skipped.
    """
    path = Path(path)
    text = path.read_text()
    rows = [r for r in csv.reader(line for line in text.splitlines()
                                  if line.strip() and not line.lstrip().startswith("#"))]
    if not rows:
        raise InputError(f"{path}: empty optical table")
    header = [h.strip() for h in rows[0]]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric entry ({exc})") from None
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] != 3:
        raise InputError(f"{path}: expected three numeric columns")
    if header == ["omega_rad_s", "eps_re", "eps_im"]:
        return OpticalTable.from_unsorted(data[:, 0], data[:, 1], data[:, 2])
    if header == ["lambda_um", "n", "k"]:
        return OpticalTable.from_nk(data[:, 0] * 1e-6, data[:, 1], data[:, 2])
    raise InputError(f"{path}: unrecognised header {','.join(header)!r}")


def _positive(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise InputError(f"{name} must be > 0")
    return x


def drude_eps_real_axis(p: DrudeParams, omega):
    """Drude permittivity ``1 - wp**2 / (w (w + i wt))`` at real frequencies."""
    omega = _positive(omega, "omega")
    return 1 - p.omega_p**2 / (omega * (omega + 1j * p.omega_tau))


def drude_eps_imag_axis(p: DrudeParams, zeta):
    """Drude permittivity continued to imaginary frequency i*zeta."""
    zeta = _positive(zeta, "zeta")
    return 1 + p.omega_p**2 / (zeta * (zeta + p.omega_tau))


# Gauss-Legendre nodes on [0, 1], cached by order.
_GL = {}


def _gauss01(n):
    if n not in _GL:
        x, w = np.polynomial.legendre.leggauss(n)
        _GL[n] = (0.5 * (x + 1), 0.5 * w)
    return _GL[n]


def _interp_nodes(table, order):
    """Quadrature nodes in u = ln(omega) and interpolated Im eps there."""
    u = np.log(table.omega)
    im = table.eps_im
    t, w = _gauss01(order)
    du = np.diff(u)
    nodes = u[:-1, None] + du[:, None] * t[None, :]
    weights = du[:, None] * w[None, :]
    lo, hi = im[:-1, None], im[1:, None]
    positive = (lo > 0) & (hi > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        loglin = np.exp(np.log(np.where(positive, lo, 1.0)) * (1 - t)
                        + np.log(np.where(positive, hi, 1.0)) * t)
    lin = lo * (1 - t) + hi * t
    values = np.where(positive, loglin, lin)
    return nodes.ravel(), (weights * values).ravel()


def _table_integral(table, zeta, order):
    # int du w^2 Im(w) / (w^2 + z^2) over the tabulated range
    u, wv = _interp_nodes(table, order)
    w2 = np.exp(2 * u)
    out = np.empty(zeta.shape)
    for s in range(0, zeta.size, 256):
        z2 = zeta[s:s + 256, None] ** 2
        out[s:s + 256] = (w2 / (w2 + z2)) @ wv
    return out


def _low_tail(table, zeta, alpha):
    w0, i0 = table.omega[0], table.eps_im[0]
    if alpha is None or i0 == 0:
        return np.zeros_like(zeta)
    amp = i0 * w0**alpha
    if alpha == 1:
        return amp / zeta * np.arctan(w0 / zeta)
    b = 2 - alpha
    z = (w0 / zeta) ** 2
    return amp * w0 ** b / zeta**2 * hyp2f1(1, b / 2, b / 2 + 1, -z) / b


def _high_tail(table, zeta, beta):
    wn, i_n = table.omega[-1], table.eps_im[-1]
    if beta is None or i_n == 0:
        return np.zeros_like(zeta)
    amp = i_n * wn**beta
    z = zeta / wn
    if beta == 3:
        # (1/z^2)(1 - arctan(z)/z) without cancellation for small z
        small = z < 1e-3
        zs = np.where(small, z, 1.0)
        big = (1 - np.arctan(zs) / zs) / zs**2
        series = 1 / 3 - z**2 / 5 + z**4 / 7
        return amp / wn**3 * np.where(small, series, big)
    return amp * wn ** (-beta) * hyp2f1(1, beta / 2, beta / 2 + 1, -(z**2)) / beta


def kk_eps_imag_axis(t: OpticalTable, zeta, extrapolation: ExtrapolationPolicy = DRUDE_TAILS,
                     rel_tol=1e-8, max_order=128):
    """eps(i*zeta) from tabulated Im eps through the dispersion relation.

    Inside the table Im eps is interpolated linearly in (ln omega, ln Im eps)
    and integrated in u = ln(omega) with Gauss-Legendre panels between
    samples; the panel order is doubled until the table part changes by less
    than ``rel_tol``. Tails follow ``extrapolation`` and are closed form.
    """
    if not isinstance(t, OpticalTable):
        raise InputError("kk_eps_imag_axis needs an OpticalTable")
    scalar = np.ndim(zeta) == 0
    zeta = np.atleast_1d(_positive(zeta, "zeta"))
    order = 8
    inside = _table_integral(t, zeta, order)
    while True:
        finer = _table_integral(t, zeta, 2 * order)
        scale = np.maximum(np.abs(finer), 1e-300)
        done = np.all(np.abs(finer - inside) <= rel_tol * scale)
        inside, order = finer, 2 * order
        if done or order >= max_order:
            break
    total = inside + _low_tail(t, zeta, extrapolation.low_exponent) \
        + _high_tail(t, zeta, extrapolation.high_exponent)
    eps = 1 + 2 / np.pi * total
    return float(eps[0]) if scalar else eps


def resistivity_spectrum(eps_values, eps_0=CODATA2018.eps_0):
    """Frequency-dependent resistivity ``Im[1 / (eps_0 (1 - eps) omega)]``.

    ``eps_values`` is an iterable of ``(omega, eps)`` pairs. Points where
    eps == 1 come back with rho = nan rather than raising.
    """
    out = []
    for omega, eps in eps_values:
        omega = float(omega)
        if not omega > 0:
            raise InputError(f"omega must be > 0, got {omega}")
        eps = complex(eps)
        if eps == 1:
            out.append((omega, math.nan))
            continue
        out.append((omega, (1 / (eps_0 * (1 - eps) * omega)).imag))
    return out


def plasma_frequency(comp: MaterialComposition, constants=CODATA2018):
    """Free-electron plasma frequency from density and valence."""
    n = comp.electrons_per_atom * constants.N_A * comp.mass_density / comp.molar_mass
    m = comp.effective_mass_ratio * constants.m_e
    return math.sqrt(constants.e_charge**2 * n / (m * constants.eps_0))


def damping_from_resistivity(omega_p, rho_0, eps_0=CODATA2018.eps_0):
    if omega_p <= 0 or rho_0 <= 0:
        raise InputError("omega_p and rho_0 must be > 0")
    return eps_0 * omega_p**2 * rho_0


# -- models consumed by the force engine -----------------------------------
#
# ``eps_imag(zeta)`` evaluates eps(i zeta) for zeta > 0. The zero-frequency
# term of the Matsubara sum needs two limits instead: ``static_eps`` is
# eps(i0) (inf for conductors) and ``static_k2`` is lim (eps - 1) zeta**2,
# which is nonzero only for the lossless plasma and the ideal conductor.


@dataclass(frozen=True)
class DrudeModel:
    params: DrudeParams

    def eps_imag(self, zeta):
        return drude_eps_imag_axis(self.params, zeta)

    @property
    def static_eps(self):
        return math.inf if self.params.omega_p > 0 else 1.0

    @property
    def static_k2(self):
        return self.params.omega_p**2 if self.params.ideal_plasma else 0.0

    def describe(self):
        p = self.params
        kind = "plasma" if p.ideal_plasma else "drude"
        return f"{kind}(omega_p={p.omega_p:.6g},omega_tau={p.omega_tau:.6g})"


@dataclass(frozen=True)
class TabulatedModel:
    table: OpticalTable
    extrapolation: ExtrapolationPolicy = DRUDE_TAILS
    name: str = "table"

    def eps_imag(self, zeta):
        return kk_eps_imag_axis(self.table, zeta, self.extrapolation)

    @property
    def static_eps(self):
        lo = self.extrapolation.low_exponent
        if lo is not None and lo >= 0 and self.table.eps_im[0] > 0:
            return math.inf
        # zeta -> 0 of the dispersion integral: (2/pi) int Im eps d(ln omega)
        t = self.table
        u, wv = _interp_nodes(t, 16)
        total = wv.sum()
        if lo is not None and t.eps_im[0] > 0:
            total += t.eps_im[0] / (-lo) if lo < 0 else 0.0
        hi = self.extrapolation.high_exponent
        if hi is not None:
            total += t.eps_im[-1] / hi
        return 1 + 2 / np.pi * total

    @property
    def static_k2(self):
        return 0.0

    def describe(self):
        t = self.table
        return (f"{self.name}(n={len(t)},omega={t.omega[0]:.4g}..{t.omega[-1]:.4g},"
                f"tails={self.extrapolation.label})")


@dataclass(frozen=True)
class IdealMetal:
    """Perfect reflector: eps = inf at every frequency."""

    static_eps: float = field(default=math.inf, init=False)
    static_k2: float = field(default=math.inf, init=False)

    def eps_imag(self, zeta):
        zeta = _positive(zeta, "zeta")
        return np.full(np.shape(zeta), math.inf)

    def describe(self):
        return "ideal-metal"
