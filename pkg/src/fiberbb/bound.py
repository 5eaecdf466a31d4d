"""
Decoherence factor of a Gaussian inhomogeneity bath and the resulting
bound on phase-shifter spacing.

The decoherence exponent for an Ohmic-family spectral density
``I(w) = alpha w^n exp(-w / w_c)`` at inverse temperature ``beta`` is

    Gamma(T) = int_0^inf I(w) coth(beta w / 2) (sin(w T / 2) / w)^2 dw

and the coherence after the fiber is ``exp(-eps tau Gamma(T))``. With
``eps ~ tau = Delta / v`` the spacing must satisfy
``(Delta / v)^2 Gamma(T) < -ln(1 - delta)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np
from scipy import integrate, optimize
from scipy.constants import c as SPEED_OF_LIGHT, hbar, k as K_B

FIBER_INDEX = 1.6
FIBER_SPEED = SPEED_OF_LIGHT / FIBER_INDEX
SILICA_DEBYE_TEMPERATURE_K = 342.0
# Reference cutoff for the spacing anchors; see debye_cutoff() for k_B T_D / hbar.
REFERENCE_CUTOFF_RAD_S = 2e13


def debye_cutoff(temperature_k: float = SILICA_DEBYE_TEMPERATURE_K) -> float:
    """``k_B T_D / hbar`` in rad/s (about 4.5e13 for amorphous silica)."""
    return K_B * temperature_k / hbar


@dataclass(frozen=True)
class SpectralDensity:
    """``alpha w^n exp(-w / w_c)``; ``alpha`` carries units of (rad/s)^(2-n)."""

    n: int
    alpha: float = 1.0
    omega_c: float = REFERENCE_CUTOFF_RAD_S
    beta: float = math.inf

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be an integer >= 1")
        if not (self.alpha > 0 and self.omega_c > 0):
            raise ValueError("alpha and omega_c must be positive")
        if not self.beta > 0:
            raise ValueError("beta must be positive (inf for zero temperature)")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return self.alpha * w ** self.n * np.exp(-w / self.omega_c)


@dataclass(frozen=True)
class BoundQuery:
    delta: float = 1e-4
    length_m: float = 1000.0
    speed_m_s: float = FIBER_SPEED
    time_s: Optional[float] = None

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError("target deficit delta must lie in (0, 1)")
        if self.speed_m_s <= 0:
            raise ValueError("speed must be positive")

    @property
    def T(self) -> float:
        return self.time_s if self.time_s is not None else self.length_m / self.speed_m_s

    def x(self, omega_c: float) -> float:
        return omega_c * self.T


# --- quadrature -------------------------------------------------------------

_PERIODS_NEAR_ZERO = 8
_U_MAX = 80.0  # e^{-80}: beyond any tolerance here


def gamma_quadrature(sd: SpectralDensity, T: float, epsrel: float = 1e-11) -> float:
    """Numerical ``Gamma(T)`` with the full ``coth`` factor.

    In ``u = w / w_c`` the integrand is ``f(u) (1 - cos(x u))`` with
    ``f = alpha w_c^(n-1) u^(n-2) e^(-u) coth(beta w_c u / 2) / 2`` and
    ``x = w_c T``. The first few oscillations are integrated directly; past
    ``a`` the smooth and Fourier parts are integrated separately (QAWF for
    the cosine tail), which avoids resolving every period when ``x`` is large.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    x = sd.omega_c * T
    bwc = sd.beta * sd.omega_c
    pref = sd.alpha * sd.omega_c ** (sd.n - 1)

    def f(u):
        val = u ** (sd.n - 2) * math.exp(-u) / 2
        if math.isfinite(bwc):
            val /= math.tanh(bwc * u / 2)
        return val

    def g(u):
        return f(u) * 2 * math.sin(x * u / 2) ** 2

    a = min(_U_MAX, 2 * math.pi * _PERIODS_NEAR_ZERO / x)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        head, _ = integrate.quad(g, 0.0, a, epsabs=0.0, epsrel=epsrel, limit=500)
        if a >= _U_MAX:
            return pref * head
        smooth, _ = integrate.quad(f, a, _U_MAX, epsabs=0.0, epsrel=epsrel, limit=500)
        scale = abs(head) + abs(smooth)
        osc, _ = integrate.quad(f, a, np.inf, weight="cos", wvar=x, epsabs=epsrel * scale * 1e-2,
                                limlst=200)
    return pref * (head + smooth - osc)


# --- closed forms -----------------------------------------------------------


def _one_minus_re_power(n: int, x: float) -> float:
    """``1 - (1 + x^2)^(-(n-1)/2) cos((n-1) arctan x)`` without cancellation at small x."""
    a = -(n - 1) / 2 * math.log1p(x * x)
    b = (n - 1) * math.atan(x)
    return -math.expm1(a) * math.cos(b) + 2 * math.sin(b / 2) ** 2


def gamma_closed_zero_T(sd: SpectralDensity, T: float) -> float:
    """Zero-temperature ``Gamma(T)`` in closed form (``beta`` is ignored)."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    x = sd.omega_c * T
    if sd.n == 1:
        return sd.alpha / 4 * math.log1p(x * x)
    return sd.alpha / 2 * sd.omega_c ** (sd.n - 1) * math.gamma(sd.n - 1) * _one_minus_re_power(sd.n, x)


def gamma_closed_table(n: int, alpha: float, omega_c: float, T: float) -> float:
    """Explicit n = 1, 2, 3 special cases in ``x = w_c T`` (cross-check of the general form)."""
    x = omega_c * T
    if n == 1:
        return alpha / 4 * math.log1p(x * x)
    if n == 2:
        return alpha / 2 * omega_c * x * x / (1 + x * x)
    if n == 3:
        return alpha / 2 * omega_c ** 2 * x * x * (3 + x * x) / (1 + x * x) ** 2
    raise ValueError("table covers n = 1, 2, 3")


def low_T_correction(sd: SpectralDensity, T: float) -> float:
    """Thermal correction with ``nbar ~ 2 exp(-beta w)``.

    Twice the zero-temperature result evaluated at the reduced cutoff
    ``w_c / (1 + beta w_c)``; add it to :func:`gamma_closed_zero_T`.
    """
    if math.isinf(sd.beta):
        return 0.0
    wc = sd.omega_c / (1 + sd.beta * sd.omega_c)
    return 2 * gamma_closed_zero_T(SpectralDensity(sd.n, sd.alpha, wc), T)


def gamma_low_T(sd: SpectralDensity, T: float) -> float:
    return gamma_closed_zero_T(sd, T) + low_T_correction(sd, T)


def coherence_factor(sd: SpectralDensity, T: float, eps_tau: float) -> float:
    """``exp(-eps tau Gamma(T))``; zero-temperature closed form plus low-T correction."""
    return math.exp(-eps_tau * gamma_low_T(sd, T))


# --- spacing bound ----------------------------------------------------------


def _validate(sd: SpectralDensity, q: BoundQuery) -> float:
    x = q.x(sd.omega_c)
    if not x > 0:
        raise ValueError("omega_c * T must be positive (the spacing formulas are singular at x = 0)")
    return x


def delta_bound(sd: SpectralDensity, q: BoundQuery, method: str = "closed") -> float:
    """Largest phase-shifter spacing (m) keeping coherence above ``1 - delta``.

    ``method="closed"`` uses the explicit n = 1, 2, 3 solutions;
    ``method="bisection"`` solves ``exp(-(Delta/v)^2 Gamma(T)) = 1 - delta``
    numerically for any ``n`` (``Gamma`` from the zero-temperature closed form
    plus the low-temperature correction).
    """
    x = _validate(sd, q)
    log_keep = math.log1p(-q.delta)  # ln(1 - delta) < 0
    v, a, wc = q.speed_m_s, sd.alpha, sd.omega_c
    if method == "closed":
        if not math.isinf(sd.beta):
            raise ValueError("closed-form spacing is zero-temperature only; use method='bisection'")
        if sd.n == 1:
            d2 = -4 * v * v * log_keep / (a * math.log1p(x * x))
        elif sd.n == 2:
            d2 = -(2 * v * v / (a * wc)) * (1 + x * x) / (x * x) * log_keep
        elif sd.n == 3:
            d2 = -(2 * v * v / (a * wc * wc)) * (1 + x * x) ** 2 / (x * x * (3 + x * x)) * log_keep
        else:
            raise ValueError("closed-form spacing exists for n = 1, 2, 3; use method='bisection'")
        return math.sqrt(d2)
    if method != "bisection":
        raise ValueError(f"unknown method {method!r}")
    gamma = gamma_low_T(sd, q.T)
    if gamma <= 0:
        return math.inf

    def excess(log_d):
        d = math.exp(log_d)
        return -(d / v) ** 2 * gamma - log_keep

    lo, hi = -200.0, 200.0
    return math.exp(optimize.brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))


def log_range(start: float, stop: float, points: int) -> np.ndarray:
    if points <= 0:
        return np.array([])
    return np.logspace(math.log10(start), math.log10(stop), points)


def figure_curve(n: int, omega_cs: Iterable[float], q: BoundQuery = BoundQuery(), alpha: float = 1.0,
                 include_reference: bool = False) -> list[tuple[float, float]]:
    """``(omega_c, Delta)`` rows of the zero-temperature spacing curve.

    With ``include_reference`` the reference cutoff is merged into the grid.
    """
    grid = sorted(set(float(w) for w in omega_cs))
    if include_reference and grid:
        grid = sorted(set(grid) | {REFERENCE_CUTOFF_RAD_S})
    return [(w, delta_bound(SpectralDensity(n, alpha, w), q)) for w in grid]


# --- rough estimates --------------------------------------------------------


@dataclass(frozen=True)
class RoughEstimate:
    order: str
    l: float
    N: float
    shifter_count: float
    delta_m: float

    def to_dict(self) -> dict:
        return {"order": self.order, "l": self.l, "N": self.N,
                "shifter_count": self.shifter_count, "delta_m": self.delta_m}


def _loss(transmission_per_km: float, span_km: float) -> Fraction:
    # binomial approximation (1 - l)^N ~ 1 - l N, applied per km
    return (1 - Fraction(str(transmission_per_km))) * Fraction(str(span_km))


def rough_estimate_linear(transmission_per_km: float = 0.95, target: float = 1e-4,
                          span_km: float = 1.0) -> RoughEstimate:
    """``l N = loss``, ``l^2 N = target``; two shifters per cancellation step."""
    loss = _loss(transmission_per_km, span_km)
    l = Fraction(str(target)) / loss
    n = loss / l
    count = 2 * n
    delta = Fraction(str(span_km)) * 1000 / count
    return RoughEstimate("linear", float(l), float(n), float(count), float(delta))


def rough_estimate_bilinear(transmission_per_km: float = 0.95, target: float = 1e-4,
                            span_km: float = 1.0) -> RoughEstimate:
    """``l N = loss``, ``l^3 N = target``; eight shifters per cancellation step."""
    loss = float(_loss(transmission_per_km, span_km))
    l = math.sqrt(target / loss)
    n = loss / l
    count = 8 * n
    return RoughEstimate("bilinear", l, n, count, span_km * 1000 / count)
