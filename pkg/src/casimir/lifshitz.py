"""Lifshitz force between two identical coated bodies.

Both the plate-plate pressure and the sphere-plate force (proximity force
theorem, integrated analytically over the separation) are written with
x = 2 p zeta_n a / c as the integration variable:

    P = kT / (8 pi a^3) sum'_n int_{x_n}^inf x^2 sum_pol R e^-x / (1 - R e^-x) dx
    F = -kT R_s / (4 a^2) sum'_n int_{x_n}^inf x sum_pol ln(1 - R e^-x) dx

with x_n = 2 zeta_n a / c and R = G^-2 the squared inverse reflection factor
per polarisation (TE = G1, TM = G2). In zero-temperature mode kT sum'_n is
replaced by (hbar / 2 pi) int d zeta.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import zeta as riemann_zeta

from casimir.constants import C, HBAR, K_B
from casimir.dielectric import IdealMetal
from casimir.errors import ConvergenceError, InputError, NumericalError, TruncationError

ZETA3 = float(riemann_zeta(3))
MAX_MATSUBARA_TERMS = 4_000_000


class ThermalMode(str, enum.Enum):
    SUM = "sum"
    INTEGRAL = "integral"


@dataclass(frozen=True)
class ThermalSpec:
    T: float = 300.0
    mode: ThermalMode = ThermalMode.SUM

    def __post_init__(self):
        object.__setattr__(self, "mode", ThermalMode(self.mode))
        if self.mode is ThermalMode.SUM and not self.T > 0:
            raise InputError("Matsubara summation needs T > 0")

    def describe(self):
        if self.mode is ThermalMode.SUM:
            return f"matsubara-sum(T={self.T:g}K)"
        return "zero-temperature-integral"


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    x_max_offset: float = 50.0
    matsubara_tail_tol: float = 1e-10

    def __post_init__(self):
        if min(self.rel_tol, self.x_max_offset, self.matsubara_tail_tol) <= 0:
            raise InputError("quadrature settings must be positive")

    @property
    def span(self):
        """Length of the x-range integrated past each lower limit."""
        return self.x_max_offset + 10 * math.log(10)

    def describe(self):
        return (f"rel_tol={self.rel_tol:g};x_max_offset={self.x_max_offset:g};"
                f"matsubara_tail_tol={self.matsubara_tail_tol:g}")


@dataclass(frozen=True)
class Layer:
    model: object
    thickness: float = math.inf

    def __post_init__(self):
        if not self.thickness > 0:
            raise InputError(f"layer thickness must be > 0, got {self.thickness}")


@dataclass(frozen=True)
class LayerStack:
    """A semi-infinite substrate with at most one finite top layer."""

    substrate: Layer
    top: Layer | None = None

    def __post_init__(self):
        if not isinstance(self.substrate, Layer):
            object.__setattr__(self, "substrate", Layer(self.substrate))
        if self.top is not None and not math.isfinite(self.top.thickness):
            raise InputError("top layer needs a finite thickness")
        if self.top is not None and isinstance(self.substrate.model, IdealMetal) \
                and not isinstance(self.top.model, IdealMetal):
            raise InputError("an ideal-metal substrate under a finite film is not supported")

    @classmethod
    def homogeneous(cls, model):
        return cls(Layer(model))

    @classmethod
    def coated(cls, substrate, top, thickness):
        return cls(Layer(substrate), Layer(top, thickness))

    @property
    def ideal(self):
        outer = self.top.model if self.top is not None else self.substrate.model
        return isinstance(outer, IdealMetal)

    @property
    def layered(self):
        return self.top is not None and not self.ideal

    def describe(self):
        s = self.substrate.model.describe()
        if self.top is None:
            return s
        return f"{self.top.model.describe()}[h={self.top.thickness:.6g}m]/{s}"


@dataclass(frozen=True)
class ForceResult:
    value: float
    n_terms_used: int
    tail_estimate: float
    thermal: ThermalSpec
    geometry: str
    metadata: dict = field(default_factory=dict, compare=False)


# -- reflection ------------------------------------------------------------
#
# Internally everything works with r = 1/G, bounded by 1 in magnitude.
# Quantities are homogeneous of degree zero in (p, s), so the same formulas
# serve for unscaled (P = p, X2 = 1) and x-scaled (P = x, X2 = x_n^2)
# arguments, with S^2 = D X2 + P^2 and D = eps - 1. Differences such as
# P - S are rewritten without cancellation.


def _r_homogeneous(P, D, X2):
    S = np.sqrt(D * X2 + P * P)
    eps = 1 + D
    r_te = -D * X2 / (P + S) ** 2
    r_tm = D * ((2 + D) * P * P - X2) / (eps * P + S) ** 2
    return r_te, r_tm


def _r_layered(P, D1, D2, X2, y_factor):
    S1 = np.sqrt(D1 * X2 + P * P)
    S2 = np.sqrt(D2 * X2 + P * P)
    e1, e2 = 1 + D1, 1 + D2
    decay = np.exp(-2 * S1 * y_factor)

    pm1 = -D1 * X2 / (P + S1)
    pp1 = P + S1
    sp = S1 + S2
    sm = (D1 - D2) * X2 / sp
    r_te = (sp * pm1 + sm * pp1 * decay) / (sp * pp1 + sm * pm1 * decay)

    tp1 = e1 * P + S1
    tm1 = D1 * ((2 + D1) * P * P - X2) / tp1
    A = e2 * S1 + e1 * S2
    B = (D2 - D1) * (X2 * e1 * e2 + (e1 + e2) * (P * P - X2)) / A
    r_tm = -(A * tm1 + B * tp1 * decay) / (A * tp1 + B * tm1 * decay)
    return r_te, r_tm


def _as_G(r):
    with np.errstate(divide="ignore"):
        g = np.where(r == 0, np.inf, 1 / np.where(r == 0, 1.0, r))
    return g if np.ndim(g) else float(g)


def reflection_factors_homogeneous(eps, p):
    """``(G1, G2)`` for a homogeneous body at eps(i zeta) and p >= 1.

    Vacuum (eps == 1) returns infinite factors, i.e. G^-2 == 0.
    """
    eps = np.asarray(eps, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(eps < 1) or np.any(p < 1):
        raise InputError("need eps >= 1 and p >= 1")
    if np.any(np.isinf(eps)):
        r_te = np.where(np.isinf(eps), -1.0, 0.0)
        r_tm = np.where(np.isinf(eps), 1.0, 0.0)
        fin = np.isfinite(eps)
        if np.any(fin):
            a, b = _r_homogeneous(p, np.where(fin, eps - 1, 0.0), 1.0)
            r_te, r_tm = np.where(fin, a, r_te), np.where(fin, b, r_tm)
    else:
        r_te, r_tm = _r_homogeneous(p, eps - 1, 1.0)
    return _as_G(r_te), _as_G(r_tm)


def reflection_factors_layered(eps1, eps2, p, zeta, h, c=C):
    """``(G1, G2)`` for a film (eps1, thickness h) on a substrate (eps2).

    The film exponential exp(zeta s1 h / c) is factored out, so any
    thickness is safe; the thick-film limit is exact once it underflows.
    G2 carries the overall minus sign of the two-layer formula, which
    drops out of every force expression (only G^2 enters).
    """
    eps1, eps2 = float(eps1), float(eps2)
    if eps1 < 1 or eps2 < 1 or p < 1 or not h > 0 or not zeta > 0:
        raise InputError("need eps1, eps2 >= 1, p >= 1, h > 0 and zeta > 0")
    r_te, r_tm = _r_layered(np.float64(p), eps1 - 1, eps2 - 1, 1.0, zeta * h / c)
    return _as_G(r_te), _as_G(r_tm)


# -- integrands ------------------------------------------------------------


def _kernel(R, x, kind):
    """Per-polarisation integrand, without the prefactor."""
    ex = np.exp(-x)
    q = R * ex
    den = np.where(q > 0.5, (1 - R) - R * np.expm1(-x), 1 - q)
    if kind == "plate":
        return x * x * q / den
    return x * np.where(q > 0.5, np.log(den), np.log1p(-q))


class _Spectrum:
    """Model data at a set of scaled frequencies xi = 2 zeta a / c."""

    def __init__(self, stack, xi, a):
        self.stack = stack
        self.xi = xi
        self.X2 = xi * xi
        zeta = xi * C / (2 * a)
        if stack.ideal:
            self.D1 = self.D2 = None
        else:
            self.D2 = stack.substrate.model.eps_imag(zeta) - 1
            if stack.layered:
                self.D1 = stack.top.model.eps_imag(zeta) - 1
                self.y_factor = stack.top.thickness / (2 * a)
            else:
                self.D1 = None

    def reflectivities(self, x):
        if self.stack.ideal:
            one = np.ones_like(x)
            return one, one
        if self.D1 is None:
            r_te, r_tm = _r_homogeneous(x, self.D2, self.X2)
        else:
            r_te, r_tm = _r_layered(x, self.D1, self.D2, self.X2, self.y_factor)
        return r_te * r_te, r_tm * r_tm


# beyond this lower limit e^-x underflows and the integral is exactly zero
_XI_UNDERFLOW = 740.0


def _frequency_integrals(stack, xi, a, kind, quad):
    """int_{xi}^{xi+span} of the integrand for every xi > 0, per polarisation."""
    live = xi < _XI_UNDERFLOW
    if not np.all(live):
        te, tm = np.zeros(xi.shape), np.zeros(xi.shape)
        if np.any(live):
            te[live], tm[live] = _frequency_integrals(stack, xi[live], a, kind, quad)
        return te, tm
    spec = _Spectrum(stack, xi, a)

    def f(t):
        x = xi + t
        R_te, R_tm = spec.reflectivities(x)
        return np.concatenate([_kernel(R_te, x, kind), _kernel(R_tm, x, kind)])

    res, err = integrate.quad_vec(f, 0.0, quad.span, epsrel=quad.rel_tol, epsabs=0.0,
                                  norm="max", points=(0.5, 2.0, 6.0, 15.0, 30.0), limit=2000)
    if not np.all(np.isfinite(res)):
        raise NumericalError(f"non-finite frequency integral at a={a:g} m")
    n = xi.size
    return res[:n], res[n:]


# -- zero-frequency term ---------------------------------------------------


def _static_reflection(stack, x, a):
    """Squared inverse reflection factors in the zeta -> 0 limit.

    Returns ``(R_te, R_tm)``; either may be a python float when the limit
    is independent of x.
    """
    if stack.ideal:
        return 1.0, 1.0
    k2_scale = (2 * a / C) ** 2
    sub = stack.substrate.model
    eps2, K2_2 = sub.static_eps, sub.static_k2 * k2_scale
    if not stack.layered:
        if K2_2 == 0:
            R_te = 0.0
        else:
            r = -K2_2 / (x + np.sqrt(x * x + K2_2)) ** 2
            R_te = r * r
        R_tm = 1.0 if math.isinf(eps2) else ((eps2 - 1) / (eps2 + 1)) ** 2
        return R_te, R_tm

    top = stack.top.model
    eps1, K2_1 = top.static_eps, top.static_k2 * k2_scale
    yf = stack.top.thickness / (2 * a)
    if K2_1 == 0 and K2_2 == 0:
        R_te = 0.0
    else:
        S1 = np.sqrt(x * x + K2_1)
        S2 = np.sqrt(x * x + K2_2)
        decay = np.exp(-2 * S1 * yf)
        pm1 = -K2_1 / (x + S1)
        pp1 = x + S1
        sp = S1 + S2
        sm = (K2_1 - K2_2) / sp
        r = (sp * pm1 + sm * pp1 * decay) / (sp * pp1 + sm * pm1 * decay)
        R_te = r * r
    if math.isinf(eps1):
        R_tm = 1.0
    else:
        decay = np.exp(-x * stack.top.thickness / a)
        if math.isinf(eps2):
            r = -((eps1 - 1) + (eps1 + 1) * decay) / ((eps1 + 1) + (eps1 - 1) * decay)
        else:
            s, d = eps1 + eps2, eps2 - eps1
            r = -(s * (eps1 - 1) + d * (eps1 + 1) * decay) / (s * (eps1 + 1) + d * (eps1 - 1) * decay)
        R_tm = r * r
    return R_te, R_tm


def _constant_integral(R, kind):
    """Closed forms of the x-integral from 0 to inf for constant R in {0, 1}."""
    if R == 0:
        return 0.0
    if R == 1:
        return 2 * ZETA3 if kind == "plate" else -ZETA3
    return None


def _static_integrals(stack, a, kind, quad):
    """x-integral of the zero-frequency integrand, per polarisation."""
    out = []
    R_pair = _static_reflection(stack, np.float64(1.0), a)
    for pol, R in enumerate(R_pair):
        if np.ndim(R) == 0 and isinstance(R, float):
            closed = _constant_integral(R, kind)
            if closed is not None:
                out.append(closed)
                continue

        def f(x, pol=pol):
            Rx = _static_reflection(stack, x, a)[pol]
            return _kernel(np.broadcast_to(Rx, np.shape(x)), x, kind)

        val, _ = integrate.quad(f, 0.0, quad.span, epsrel=quad.rel_tol, epsabs=0.0, limit=500,
                                points=(0.5, 2.0, 6.0, 15.0, 30.0))
        out.append(val)
    return out[0], out[1]


def static_limit_crosscheck(stack, a, T=300.0, kind="plate", factors=(1e-4, 1e-5),
                            quad=QuadratureSpec()):
    """Compare the analytic zero-frequency term with small-zeta evaluations.

    Returns a list of ``(factor, te_analytic, te_numeric, tm_analytic,
    tm_numeric)`` where the numeric values use zeta = factor * zeta_1.
    """
    te0, tm0 = _static_integrals(stack, a, kind, quad)
    xi1 = 2 * matsubara_frequency(1, T) * a / C
    rows = []
    for fct in factors:
        te, tm = _frequency_integrals(stack, np.array([fct * xi1]), a, kind, quad)
        rows.append((fct, te0, float(te[0]), tm0, float(tm[0])))
    return rows


# -- summation -------------------------------------------------------------


def _stop_x(tol, x1):
    """x beyond which (x^2 + 2x + 2) e^-x is negligible for the tail test."""
    target = tol * min(1.0, x1) * 0.1
    x = 1.0
    for _ in range(100):
        x = -math.log(target / (x * x + 2 * x + 2))
    return x


def _matsubara_sum(stack, a, T, kind, quad):
    xi1 = 2 * matsubara_frequency(1, T) * a / C
    te0, tm0 = _static_integrals(stack, a, kind, quad)
    head = 0.5 * (te0 + tm0)
    tol = quad.matsubara_tail_tol

    terms = []
    n_next = 1
    n_block = max(8, int(math.ceil(_stop_x(tol, xi1) / xi1)) + 3)
    if n_block > MAX_MATSUBARA_TERMS:
        raise TruncationError(
            f"Matsubara sum needs about {n_block} terms at a={a:g} m, T={T:g} K "
            f"(limit {MAX_MATSUBARA_TERMS}); use the zero-temperature integral")
    while True:
        n = np.arange(n_next, n_next + n_block, dtype=float)
        te, tm = _frequency_integrals(stack, n * xi1, a, kind, quad)
        terms.extend((te + tm).tolist())
        n_next += n_block
        total = math.fsum([head] + terms)
        last = terms[-3:]
        if all(abs(t) < tol * abs(total) for t in last):
            if last[-1] == 0:
                tail = 0.0
                break
            ratio = last[-1] / last[-2]
            if 0 < ratio < 1:
                tail = last[-1] * ratio / (1 - ratio)
                if abs(tail) <= tol * abs(total):
                    break
        if n_next > MAX_MATSUBARA_TERMS:
            raise TruncationError(
                f"Matsubara sum not converged after {n_next - 1} terms at a={a:g} m")
        n_block *= 2
    return total + tail, len(terms) + 1, tail


# Outer panels in xi for the zero-temperature integral; the last edge is
# replaced by the quadrature span.
_XI_EDGES = (0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


def _zero_t_integral(stack, a, kind, quad):
    edges = np.array(_XI_EDGES[:-1] + (quad.span,))
    lo, width = edges[:-1], np.diff(edges)

    def outer(order):
        x, w = np.polynomial.legendre.leggauss(order)
        nodes = (lo[:, None] + width[:, None] * 0.5 * (x + 1)).ravel()
        weights = (width[:, None] * 0.5 * w).ravel()
        te, tm = _frequency_integrals(stack, nodes, a, kind, quad)
        return math.fsum((weights * (te + tm)).tolist()), nodes.size

    value, _ = outer(8)
    for order in (16, 32, 64):
        finer, n_nodes = outer(order)
        if abs(finer - value) <= max(quad.rel_tol, 1e-12) * 10 * abs(finer):
            return finer, n_nodes
        value = finer
    raise ConvergenceError(f"zero-temperature frequency integral not converged at a={a:g} m",
                           best=finer)


# -- public force functions ------------------------------------------------


def matsubara_frequency(n, T):
    """zeta_n = 2 pi n k T / hbar in rad/s."""
    if n < 0 or not T > 0:
        raise InputError("need n >= 0 and T > 0")
    return 2 * math.pi * n * K_B * T / HBAR


def ideal_casimir_pressure(a):
    """Casimir's perfect-conductor, zero-temperature pressure in Pa."""
    if not a > 0:
        raise InputError("separation must be > 0")
    return math.pi**2 * HBAR * C / (240 * a**4)


def ideal_casimir_sphere_force(a, R):
    """Proximity-force sphere-plate counterpart of the Casimir pressure, in N."""
    if not (a > 0 and R > 0):
        raise InputError("separation and radius must be > 0")
    return math.pi**3 * HBAR * C * R / (360 * a**3)


def _evaluate(stack, a, thermal, quad, kind):
    if not a > 0:
        raise InputError(f"separation must be > 0, got {a}")
    if thermal.mode is ThermalMode.SUM:
        s, n_terms, tail = _matsubara_sum(stack, a, thermal.T, kind, quad)
        return K_B * thermal.T * s, n_terms, K_B * thermal.T * tail
    s, n_nodes = _zero_t_integral(stack, a, kind, quad)
    return HBAR * C / (4 * math.pi * a) * s, n_nodes, 0.0


def _metadata(stack, thermal, quad):
    return {"stack": stack.describe(), "thermal": thermal.describe(), "quadrature": quad.describe()}


def plate_pressure(stack: LayerStack, a, thermal=ThermalSpec(), quad=QuadratureSpec()):
    """Attractive pressure (Pa) between two identical half-spaces at separation a."""
    s, n, tail = _evaluate(stack, a, thermal, quad, "plate")
    pre = 1 / (8 * math.pi * a**3)
    return ForceResult(pre * s, n, pre * tail, thermal, "plate-plate",
                       _metadata(stack, thermal, quad))


def check_sphere_geometry(a, R):
    if not (a > 0 and R > 0):
        raise InputError("separation and radius must be > 0")
    if R / a < 100:
        raise InputError(f"proximity force approximation needs R/a >= 100, got {R / a:.3g}")
    if R / a < 1000:
        warnings.warn(f"R/a = {R / a:.3g} < 1000: proximity force approximation is marginal",
                      stacklevel=3)


def sphere_plate_force(stack: LayerStack, a, R, thermal=ThermalSpec(), quad=QuadratureSpec()):
    """Attractive sphere-plate force (N) from the proximity force theorem."""
    check_sphere_geometry(a, R)
    s, n, tail = _evaluate(stack, a, thermal, quad, "sphere")
    pre = -R / (4 * a**2)
    return ForceResult(pre * s, n, abs(pre * tail), thermal, "sphere-plate",
                       _metadata(stack, thermal, quad))


def pft_consistency_check(stack, a, R, thermal=ThermalSpec(), quad=QuadratureSpec(),
                          epsrel=1e-7):
    """Closed-form sphere-plate force against 2 pi R int_a^inf P(a') da'.

    The separation integral is taken in u = a / a' on (0, 1], where the
    integrand vanishes at u = 0 for both thermal modes.
    """
    closed = sphere_plate_force(stack, a, R, thermal, quad).value

    def f(u):
        if u <= 0:
            return 0.0
        return plate_pressure(stack, a / u, thermal, quad).value / (u * u)

    val, _ = integrate.quad(f, 0.0, 1.0, epsrel=epsrel, epsabs=0.0, limit=200)
    integrated = 2 * math.pi * R * a * val
    return closed, integrated, abs(closed - integrated) / abs(integrated)


@dataclass(frozen=True)
class ForceJob:
    """Stack, geometry and numerics for evaluating a force curve."""

    stack: LayerStack
    geometry: str = "sphere-plate"
    radius: float | None = None
    thermal: ThermalSpec = ThermalSpec()
    quad: QuadratureSpec = QuadratureSpec()

    def __post_init__(self):
        if self.geometry not in ("sphere-plate", "plate-plate"):
            raise InputError(f"unknown geometry {self.geometry!r}")
        if self.geometry == "sphere-plate" and not (self.radius and self.radius > 0):
            raise InputError("sphere-plate geometry needs a radius")

    def evaluate(self, a) -> ForceResult:
        if self.geometry == "plate-plate":
            return plate_pressure(self.stack, a, self.thermal, self.quad)
        return sphere_plate_force(self.stack, a, self.radius, self.thermal, self.quad)

    def force(self, a) -> float:
        return self.evaluate(a).value

    def with_stack(self, stack):
        return ForceJob(stack, self.geometry, self.radius, self.thermal, self.quad)
