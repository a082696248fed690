"""Probe/FWM intensity cross-correlation for a single-photon probe pulse.

All Fourier integrals are carried out over the dimensionless variable
ζ = ω τ_p.  Pulse-weighted integrals use the spectral weight |P(ζ)|^2, which
integrates to one.  Vacuum (spontaneous) integrals carry the measure dζ/2π.
Both kinds are therefore counts per pulse duration.  Dividing by τ_p turns
them into rates, so G1 is reported in 1/s and G2 in 1/s^2.

    G2(τ) = G1_E1 G1_E2 + |Y(τ)|^2 + X(τ) Ỹ(τ) + X'(τ) Y(τ)

    X(τ)  = ∫ dζ |P|^2 R1* R2 e^{-iζτ/τ_p}     X'(τ) = ∫ dζ |P|^2 R1 R2* e^{iζτ/τ_p}
    Y(τ)  = ∫ dζ/2π S1* S2 e^{iζτ/τ_p}        Ỹ(τ)  = ∫ dζ/2π S1 S2* e^{-iζτ/τ_p}
    G1_E1 = ∫ |P|^2 |R1|^2 + ∫ dζ/2π |S1|^2
    G1_E2 = ∫ dζ/2π |R2|^2 + ∫ |P|^2 |R2|^2

The pulse-weighted integrals are computed on a narrow grid matched to the
Gaussian spectrum.  The vacuum integrals need a much wider grid because the
gain structure of the medium extends to |ζ| of several hundred.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConvergenceError, NumericalError
from .model import CompositeDetunings, ModelParams, derive_ds
from .propagation import transfer

log = logging.getLogger(__name__)

DEFAULT_PULSE_GRID = (-40.0, 40.0, 4097)
DEFAULT_VACUUM_GRID = (-5000.0, 5000.0, 2 ** 13 + 1)
CONVERGENCE_RTOL = 1e-4


@dataclass(frozen=True)
class PulseSpectrum:
    """Spectral amplitude of the input photon on a ζ grid.

    ``amplitude`` is normalized in angular frequency, ∫|P(ω)|^2 dω = 1 on the
    grid (trapezoid rule), so it carries units of sqrt(s).
    """

    shape: str
    tau_p: float
    zeta: np.ndarray
    amplitude: np.ndarray
    rule: str = "trapezoid"
    quad_weights: np.ndarray | None = None

    @property
    def omega(self):
        return self.zeta / self.tau_p

    def weight_zeta(self):
        """|P|^2 expressed per unit ζ (integrates to one over ζ)."""
        return np.abs(self.amplitude) ** 2 / self.tau_p

    def integrate(self, values):
        """∫ dζ |P(ζ)|^2 values(ζ) for values sampled on ``zeta`` (last axis)."""
        if self.rule == "hermite":
            return np.sum(self.quad_weights * values, axis=-1)
        return np.trapezoid(self.weight_zeta() * values, self.zeta, axis=-1)

    def norm(self) -> float:
        return float(np.trapezoid(np.abs(self.amplitude) ** 2, self.omega))


def gaussian_spectrum(tau_p: float, zeta_max: float = 40.0, points: int = 4097,
                      rule: str = "trapezoid") -> PulseSpectrum:
    """Spectrum of the unit-peak pulse exp(-t^2/τ_p^2): |P(ζ)|^2 ∝ exp(-ζ^2/2).

    ``rule="hermite"`` places ``points`` Gauss-Hermite nodes instead of a
    uniform grid; the node weights then absorb the Gaussian factor.
    """
    if rule == "hermite":
        x, w = np.polynomial.hermite.hermgauss(points)
        zeta = math.sqrt(2.0) * x
        amp = np.exp(-zeta ** 2 / 4) * math.sqrt(tau_p / math.sqrt(2 * math.pi))
        return PulseSpectrum("gaussian", tau_p, zeta, amp, "hermite", w / math.sqrt(math.pi))
    zeta = np.linspace(-zeta_max, zeta_max, points)
    amp = np.exp(-zeta ** 2 / 4)
    amp = amp / math.sqrt(np.trapezoid(amp ** 2, zeta / tau_p))
    return PulseSpectrum("gaussian", tau_p, zeta, amp)


@dataclass(frozen=True)
class CorrelationSeries:
    tau_d: np.ndarray
    g2_raw: np.ndarray
    g1_e1: float
    g1_e2: float
    imag_residual: float
    g2_norm: np.ndarray | None = None
    rc: np.ndarray | None = None
    epsilon: float | None = None
    delta_t: float | None = None
    info: dict = field(default_factory=dict)


def _fourier(tau_scaled, zeta, values, sign, chunk=32):
    """∫ dζ values(ζ) e^{sign·iζτ} for each τ (trapezoid), chunked over τ."""
    out = np.empty(tau_scaled.size, dtype=complex)
    wts = np.full(zeta.size, zeta[1] - zeta[0])
    wts[0] *= 0.5
    wts[-1] *= 0.5
    vw = values * wts
    for i in range(0, tau_scaled.size, chunk):
        t = tau_scaled[i:i + chunk]
        out[i:i + chunk] = np.exp(sign * 1j * np.outer(t, zeta)) @ vw
    return out


def _pulse_fourier(tau_scaled, spectrum: PulseSpectrum, values, sign, chunk=64):
    out = np.empty(tau_scaled.size, dtype=complex)
    for i in range(0, tau_scaled.size, chunk):
        t = tau_scaled[i:i + chunk]
        out[i:i + chunk] = spectrum.integrate(values * np.exp(sign * 1j * np.outer(t, spectrum.zeta)))
    return out


def _g2_once(tau_d, L, ds, params, spectrum, vac):
    tp = params.tau_p
    ts = np.asarray(tau_d, dtype=float) / tp
    tn = transfer(L, spectrum.zeta / tp, ds, params)
    zw = np.linspace(*vac)
    tw = transfer(L, zw / tp, ds, params)
    f1 = float(spectrum.integrate(np.abs(tn.r1) ** 2).real)
    f2 = float(spectrum.integrate(np.abs(tn.r2) ** 2).real)
    n1 = float(np.trapezoid(np.abs(tw.s1) ** 2, zw) / (2 * math.pi))
    c22 = float(np.trapezoid(np.abs(tw.r2) ** 2, zw) / (2 * math.pi))
    g1_e1 = f1 + n1
    g1_e2 = c22 + f2
    x = _pulse_fourier(ts, spectrum, np.conj(tn.r1) * tn.r2, -1)
    xc = _pulse_fourier(ts, spectrum, tn.r1 * np.conj(tn.r2), +1)
    y = _fourier(ts, zw, np.conj(tw.s1) * tw.s2, +1) / (2 * math.pi)
    yc = _fourier(ts, zw, tw.s1 * np.conj(tw.s2), -1) / (2 * math.pi)
    g2 = g1_e1 * g1_e2 + np.abs(y) ** 2 + x * yc + xc * y
    return g2 / tp ** 2, g1_e1 / tp, g1_e2 / tp


def _denser(grid):
    lo, hi, n = grid
    return (lo, hi, 2 * n - 1)


def g2_cross(tau_d_grid, L: float, ds: CompositeDetunings | None, params: ModelParams,
             spectrum: PulseSpectrum | None = None, vacuum_grid=DEFAULT_VACUUM_GRID,
             check_convergence: bool = True) -> CorrelationSeries:
    """Cross-correlation G2(τ_d) [1/s^2] after a medium of length L.

    With ``check_convergence`` the calculation is repeated with both grids at
    doubled density.  A change above 1e-4 relative raises ConvergenceError.
    The relative change is measured against max(|G2|, G1_E1·G1_E2).
    """
    ds = derive_ds(params) if ds is None else ds
    if spectrum is None:
        spectrum = gaussian_spectrum(params.tau_p, DEFAULT_PULSE_GRID[1], DEFAULT_PULSE_GRID[2])
    tau_d = np.asarray(tau_d_grid, dtype=float)
    g2, g1a, g1b = _g2_once(tau_d, L, ds, params, spectrum, vacuum_grid)
    peak = float(np.max(np.abs(g2))) if g2.size else 0.0
    resid = float(np.max(np.abs(g2.imag)) / peak) if peak > 0 else 0.0
    info = {"pulse_rule": spectrum.rule, "pulse_points": int(spectrum.zeta.size),
            "pulse_zeta_max": float(np.max(np.abs(spectrum.zeta))),
            "vacuum_zeta_min": float(vacuum_grid[0]), "vacuum_zeta_max": float(vacuum_grid[1]),
            "vacuum_points": int(vacuum_grid[2]), "L": float(L)}
    if check_convergence and peak > 0:
        if spectrum.rule == "hermite":
            dense = gaussian_spectrum(params.tau_p, points=2 * spectrum.zeta.size, rule="hermite")
        else:
            dense = gaussian_spectrum(params.tau_p, float(np.max(spectrum.zeta)),
                                      2 * spectrum.zeta.size - 1)
        g2d, _, _ = _g2_once(tau_d, L, ds, params, dense, _denser(vacuum_grid))
        floor = g1a * g1b
        change = float(np.max(np.abs(g2d.real - g2.real) / np.maximum(np.abs(g2.real), floor)))
        info["density_doubling_change"] = change
        if change > CONVERGENCE_RTOL:
            raise ConvergenceError(f"quadrature changes by {change:.2e} on doubling",
                                   "correlation", "g2_cross", {"L": L, "dtp": params.dtp})
    return CorrelationSeries(tau_d, g2.real, g1a, g1b, resid, info=info)


def normalize_g2(series: CorrelationSeries) -> CorrelationSeries:
    if series.g1_e1 < 1e-30 or series.g1_e2 < 1e-30:
        raise NumericalError("single-mode intensity below 1e-30", "correlation",
                             "normalize_g2", {"g1_e1": series.g1_e1, "g1_e2": series.g1_e2})
    return replace(series, g2_norm=series.g2_raw / (series.g1_e1 * series.g1_e2))


def coincidence_rate(series: CorrelationSeries, epsilon: float = 1.0,
                     delta_t: float = 1e-9) -> CorrelationSeries:
    if not delta_t > 0:
        raise ValueError("delta_t must be positive")
    return replace(series, rc=epsilon ** 2 * delta_t * series.g2_raw,
                   epsilon=epsilon, delta_t=delta_t)


def local_maxima(x, y, lo=None, hi=None):
    """(positions, values) of strict interior local maxima of y within [lo, hi]."""
    x = np.asarray(x)
    y = np.asarray(y)
    sel = np.ones(x.size, dtype=bool)
    if lo is not None:
        sel &= x >= lo
    if hi is not None:
        sel &= x <= hi
    xs, ys = x[sel], y[sel]
    idx = np.flatnonzero((ys[1:-1] > ys[:-2]) & (ys[1:-1] > ys[2:])) + 1
    return xs[idx], ys[idx]


def correlation_time(series: CorrelationSeries) -> float:
    """Full width at half maximum of the central feature of g2_norm - 1.

    The half-maximum crossings on both sides of the global peak are located by
    linear interpolation.
    """
    g = (series.g2_norm if series.g2_norm is not None else normalize_g2(series).g2_norm) - 1.0
    t = series.tau_d
    i = int(np.argmax(g))
    half = g[i] / 2
    j = i
    while j > 0 and g[j] > half:
        j -= 1
    k = i
    while k < g.size - 1 and g[k] > half:
        k += 1
    if g[j] > half or g[k] > half:
        raise NumericalError("central feature not resolved within the τ grid", "correlation",
                             "correlation_time", {"peak_tau": float(t[i])})
    left = t[j] + (half - g[j]) * (t[j + 1] - t[j]) / (g[j + 1] - g[j])
    right = t[k - 1] + (half - g[k - 1]) * (t[k] - t[k - 1]) / (g[k] - g[k - 1])
    return float(right - left)
