"""Field transfer coefficients, adiabatic envelopes and an ODE reference solver.

The probe field and the conjugate four-wave-mixing field obey the linear
system

    d e1/dz  = i(ω/c + D1) e1 + i D2 e2*
    d e2*/dz = i D3 e1 + i(ω/c + D4) e2*

whose solution is expressed through the 2x2 matrix [[R1, S1], [R2, S2]].
Phase mismatch Δk is held at zero throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import ZeroFreqConstants, coeffs, eigen
from .errors import ConvergenceError, DegenerateModeError
from .model import CompositeDetunings, ModelParams, derive_ds

OVERFLOW_LOG = 700.0
U_GAP_FLOOR = 1e-30


@dataclass(frozen=True)
class TransferMatrix:
    z: float
    omega: np.ndarray | float
    r1: np.ndarray | complex
    s1: np.ndarray | complex
    r2: np.ndarray | complex
    s2: np.ndarray | complex
    overflow: np.ndarray | bool = False

    def matrix(self) -> np.ndarray:
        """Entries stacked as (..., 2, 2)."""
        m = np.array([[self.r1, self.s1], [self.r2, self.s2]], dtype=complex)
        return np.moveaxis(m, (0, 1), (-2, -1))

    def determinant(self):
        return self.r1 * self.s2 - self.s1 * self.r2


@dataclass(frozen=True)
class EnvelopeField:
    z: float
    t: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    eta_plus: np.ndarray
    eta_minus: np.ndarray


def _pack(z, w, r1, s1, r2, s2, overflow, scalar):
    if scalar:
        return TransferMatrix(float(z), float(w), complex(r1), complex(s1), complex(r2),
                              complex(s2), bool(np.any(overflow)))
    return TransferMatrix(float(z), w, r1, s1, r2, s2, overflow)


def transfer(z: float, omega, ds: CompositeDetunings | None, params: ModelParams,
             reference_d5=None) -> TransferMatrix:
    """Closed-form transfer coefficients at length ``z`` (m) and detuning ``omega``.

    The differences of exponentials are formed with ``expm1`` so that short
    lengths and nearly degenerate modes keep full relative accuracy.  When the
    cross coupling vanishes (D2 = 0 or D3 = 0) the system is triangular and
    the exact triangular solution is used.
    """
    ds = derive_ds(params) if ds is None else ds
    scalar = np.ndim(omega) == 0
    w = np.asarray(omega, dtype=float)
    s = eigen(w, ds, params, reference_d5)
    D1, D2, D3, D4 = (np.asarray(x, dtype=complex) for x in s.d_coeffs)
    lp = np.asarray(s.lambda_plus, dtype=complex)
    lm = np.asarray(s.lambda_minus, dtype=complex)
    up = np.asarray(s.u_plus, dtype=complex)
    um = np.asarray(s.u_minus, dtype=complex)
    overflow = (np.maximum(-lp.imag, -lm.imag) * z) > OVERFLOW_LOG

    decoupled = (D2 == 0) | (D3 == 0)
    gap = up - um
    bad = ~decoupled & ~(np.abs(gap) > U_GAP_FLOOR)
    if np.any(bad):
        i = np.flatnonzero(np.atleast_1d(bad))[0]
        raise DegenerateModeError("|U+ - U-| below floor", "propagation", "transfer",
                                  {"z": z, "omega": float(np.atleast_1d(w)[i])})
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        ep = np.exp(1j * lp * z)
        de = ep * np.expm1(1j * (lm - lp) * z)  # e^{iλ-z} - e^{iλ+z}
        safe_gap = np.where(decoupled, 1.0, gap)
        r1 = ep - um * de / safe_gap
        s1 = up * um * de / safe_gap
        r2 = -de / safe_gap
        s2 = ep + up * de / safe_gap
        if np.any(decoupled):
            k = w / params.c
            a = k + D1
            b = k + D4
            ea = np.exp(1j * a * z)
            eb = np.exp(1j * b * z)
            diff = eb * np.expm1(1j * (a - b) * z)  # e^{iaz} - e^{ibz}
            small = np.abs(a - b) * max(z, 1e-300) < 1e-300
            frac = np.where(small, 1j * z * ea, diff / np.where(small, 1.0, a - b))
            r1 = np.where(decoupled, ea, r1)
            s2 = np.where(decoupled, eb, s2)
            s1 = np.where(decoupled, D2 * frac, s1)
            r2 = np.where(decoupled, D3 * frac, r2)
    if z == 0:
        one = np.ones_like(r1)
        zero = np.zeros_like(r1)
        r1, s1, r2, s2 = one, zero, zero, one
    return _pack(z, w, r1, s1, r2, s2, overflow, scalar)


def _rk4(m, z, steps):
    """Integrate dX/dz = i M X from X(0) = I with fixed-step RK4 (pure Python)."""
    a, b, c, d = (complex(x) for x in (1j * m[0][0], 1j * m[0][1], 1j * m[1][0], 1j * m[1][1]))
    h = z / steps
    # columns evolve independently; integrate both canonical initial conditions
    cols = []
    for x0, y0 in ((1.0 + 0j, 0j), (0j, 1.0 + 0j)):
        x, y = x0, y0
        for _ in range(steps):
            k1x = a * x + b * y
            k1y = c * x + d * y
            xm, ym = x + 0.5 * h * k1x, y + 0.5 * h * k1y
            k2x = a * xm + b * ym
            k2y = c * xm + d * ym
            xm, ym = x + 0.5 * h * k2x, y + 0.5 * h * k2y
            k3x = a * xm + b * ym
            k3y = c * xm + d * ym
            xe, ye = x + h * k3x, y + h * k3y
            k4x = a * xe + b * ye
            k4y = c * xe + d * ye
            x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        cols.append((x, y))
    (r1, r2), (s1, s2) = cols
    return np.array([[r1, s1], [r2, s2]])


@dataclass(frozen=True)
class OracleResult:
    matrix: TransferMatrix
    steps: int
    change: float


def ode_oracle(z: float, omega: float, ds: CompositeDetunings | None, params: ModelParams,
               steps: int = 10_000, tol: float = 1e-8, max_doublings: int = 3) -> OracleResult:
    """Reference transfer matrix by direct RK4 integration with step doubling."""
    ds = derive_ds(params) if ds is None else ds
    D1, D2, D3, D4 = coeffs(float(omega), ds, params)
    k = float(omega) / params.c
    m = [[k + D1, D2], [D3, k + D4]]
    prev = _rk4(m, z, steps)
    n = steps
    for _ in range(max_doublings):
        n *= 2
        cur = _rk4(m, z, n)
        scale = max(np.max(np.abs(cur)), 1e-300)
        change = float(np.max(np.abs(cur - prev)) / scale)
        if change <= tol:
            tm = TransferMatrix(float(z), float(omega), cur[0, 0], cur[0, 1], cur[1, 0], cur[1, 1])
            return OracleResult(tm, n, change)
        prev = cur
    raise ConvergenceError(f"RK4 did not converge (last change {change:.2e})",
                           "propagation", "ode_oracle", {"z": z, "omega": omega})


def gaussian_profile(t, tau_p):
    """Unit-peak Gaussian with 1/e amplitude half-width tau_p (complex t allowed)."""
    return np.exp(-(np.asarray(t) / tau_p) ** 2)


def envelope_adiabatic(z: float, t_grid, input_profile, constants: ZeroFreqConstants,
                       vacuum_fwm: bool = True) -> EnvelopeField:
    """Two-packet adiabatic envelopes for a probe pulse and vacuum FWM input.

    ``input_profile`` is a callable P(t) accepting complex retarded times;
    complex group velocities therefore shift and reshape the packets.
    """
    t = np.asarray(t_grid, dtype=float)
    c = constants
    if z == 0:
        eta_p = eta_m = t.astype(complex)
    else:
        eta_p = t - z / c.vg_plus
        eta_m = t - z / c.vg_minus
    gp = np.exp(c.beta_plus * z)
    gm = np.exp(c.beta_minus * z)
    pp = input_profile(eta_p)
    pm = input_profile(eta_m)
    e1 = c.a1 * pp * gp - c.a3 * pm * gm
    e2 = c.a * pp * gp - c.a * pm * gm
    return EnvelopeField(float(z), t, e1, e2, np.asarray(eta_p), np.asarray(eta_m))
