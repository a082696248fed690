"""Photon-number amplitudes of the probe/FWM output state.

Two routes are provided:

* closed-form pair amplitudes built from the zero-frequency mode constants
  (valid when both packets travel together and the gain is weak), and
* a truncated two-mode Fock-space oracle.  Its generator

      H = -(k + D1) a†a - D2 a†b† + (k + D4) b†b + D3 a b

  (a: probe, b: FWM, k = ω/c) satisfies i[H, a] = i((k + D1) a + D2 b†) and
  i[H, b†] = i(D3 a + (k + D4) b†), i.e. its Heisenberg action reproduces the
  field equations.  The state is evolved as ψ(L) = exp(-i H L) ψ(0).

The generator conserves n_probe - n_fwm, so from |1,0> only the (n, n-1)
amplitudes are populated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .dispersion import ZeroFreqConstants, coeffs
from .errors import CutoffError, GeneratorMismatchError, LogDomainError
from .model import CompositeDetunings, ModelParams, derive_ds

GENERATOR_TOL = 1e-10
CUTOFF_TOL = 1e-8


@dataclass(frozen=True)
class PairStateSummary:
    a10_sq: float
    a21_sq: float
    phi: float
    heralded_pair_prob: float
    raw_a10_sq: float
    raw_a21_sq: float
    negative: bool = False


@dataclass(frozen=True)
class TwoModeAmplitudes:
    """Amplitudes α_nm stored as a (cutoff+1, cutoff+1) array, n = probe photons."""

    cutoff: int
    array: np.ndarray
    normalized: bool = False

    def __getitem__(self, nm):
        n, m = nm
        if n > self.cutoff or m > self.cutoff or n < 0 or m < 0:
            return 0j
        return complex(self.array[n, m])

    @property
    def amps(self) -> dict:
        return {(n, m): complex(self.array[n, m])
                for n in range(self.cutoff + 1) for m in range(self.cutoff + 1)}

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.array) ** 2))

    def normalize(self) -> "TwoModeAmplitudes":
        nrm = math.sqrt(self.norm_sq())
        if nrm == 0:
            raise LogDomainError("cannot normalize a null state", "quantum_state", "normalize")
        return TwoModeAmplitudes(self.cutoff, self.array / nrm, True)

    def population_above(self, total: int) -> float:
        """Σ|α_nm|^2 over n + m > total."""
        n, m = np.indices(self.array.shape)
        return float(np.sum(np.abs(self.array[(n + m) > total]) ** 2))


@dataclass(frozen=True)
class HeraldedPair:
    vacuum_weight: float
    pair_weight: float
    phase: float
    pair_probability: float
    amplitudes: tuple  # (vacuum, |1,1>) amplitudes of the heralded superposition


@dataclass(frozen=True)
class SpacsResult:
    amplitudes: TwoModeAmplitudes
    probe_state: np.ndarray | None
    probability: float
    fidelity: float | None


@dataclass
class MultiphotonSeries:
    z: np.ndarray
    ratio: np.ndarray
    ratio_raw: np.ndarray
    reference: float = 2.0
    gaps: list = field(default_factory=list)


# -- closed form -------------------------------------------------------------------

def amplitudes_closed_form(L: float, constants: ZeroFreqConstants,
                           pulse_peak_sq: float = 1.0) -> PairStateSummary:
    c = constants
    ep = cmath.exp(c.beta_plus * L)
    em = cmath.exp(c.beta_minus * L)
    lead = c.a1 * ep - c.a3 * em
    diff = ep - em
    a_sq = abs(c.a) ** 2
    raw10 = (abs(lead) ** 2 + abs(c.a2) ** 2 * abs(diff) ** 2
             - 4 * a_sq * abs(diff) ** 2) * pulse_peak_sq
    raw21 = 2 * a_sq * abs(diff) ** 2 * pulse_peak_sq
    phi = cmath.phase(lead * diff.conjugate() * c.a.conjugate()) if raw21 > 0 else 0.0
    negative = raw10 < 0
    total = max(raw10, 0.0) + raw21
    a10 = max(raw10, 0.0) / total if total > 0 else 0.0
    a21 = raw21 / total if total > 0 else 0.0
    return PairStateSummary(a10, a21, phi, a21 / 2, raw10, raw21, negative)


def herald_pair(summary: PairStateSummary) -> HeraldedPair:
    """State after a trigger click: α10|0,0> + e^{-iφ} α21|1,1>."""
    v = math.sqrt(max(summary.a10_sq, 0.0))
    p = math.sqrt(max(summary.a21_sq, 0.0)) * cmath.exp(-1j * summary.phi)
    return HeraldedPair(summary.a10_sq, summary.a21_sq, summary.phi,
                        summary.a21_sq / 2, (complex(v), complex(p)))


# -- Fock-space oracle -------------------------------------------------------------

def mode_operators(cutoff: int):
    """Annihilators (a, b) on the truncated product space, index = n*(cutoff+1) + m."""
    lower = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)
    eye = np.eye(cutoff + 1)
    return np.kron(lower, eye), np.kron(eye, lower)


def generator(d_coeffs, cutoff: int, k: float = 0.0) -> np.ndarray:
    D1, D2, D3, D4 = d_coeffs
    a, b = mode_operators(cutoff)
    ad, bd = a.T, b.T
    return -(k + D1) * ad @ a - D2 * ad @ bd + (k + D4) * bd @ b + D3 * a @ b


def verify_generator(h: np.ndarray, d_coeffs, cutoff: int, k: float = 0.0) -> float:
    """Largest deviation of [H, a], [H, b†] from the target linear combinations.

    Only columns with n, m < cutoff are compared; on the top rung the
    truncation legitimately alters the commutators.
    """
    D1, D2, D3, D4 = d_coeffs
    a, b = mode_operators(cutoff)
    bd = b.T
    n, m = np.divmod(np.arange((cutoff + 1) ** 2), cutoff + 1)
    cols = (n < cutoff) & (m < cutoff)
    dev_a = (h @ a - a @ h) - ((k + D1) * a + D2 * bd)
    dev_b = (h @ bd - bd @ h) - (D3 * a + (k + D4) * bd)
    scale = max(1.0, max(abs(x) for x in (k + D1, D2, D3, k + D4)))
    dev = max(np.max(np.abs(dev_a[:, cols])), np.max(np.abs(dev_b[:, cols])))
    return float(dev / scale)


def basis_state(cutoff: int, n: int, m: int) -> np.ndarray:
    v = np.zeros((cutoff + 1) ** 2, dtype=complex)
    v[n * (cutoff + 1) + m] = 1.0
    return v


def evolve(d_coeffs, L: float, psi0: np.ndarray, cutoff: int, k: float = 0.0,
           check_generator: bool = True) -> np.ndarray:
    h = generator(d_coeffs, cutoff, k)
    if check_generator:
        dev = verify_generator(h, d_coeffs, cutoff, k)
        if dev > GENERATOR_TOL:
            raise GeneratorMismatchError(f"generator deviates by {dev:.2e}", "quantum_state",
                                         "evolve", {"L": L, "cutoff": cutoff})
    return expm(-1j * L * h) @ psi0


def series_evolve(d_coeffs, L: float, psi0: np.ndarray, cutoff: int, order: int = 3,
                  k: float = 0.0) -> np.ndarray:
    """Truncated Taylor series of exp(-i H L) ψ0 (independent small-gain check)."""
    x = -1j * L * generator(d_coeffs, cutoff, k)
    term = psi0.astype(complex)
    out = term.copy()
    for j in range(1, order + 1):
        term = x @ term / j
        out = out + term
    return out


def _as_amplitudes(psi, cutoff):
    return TwoModeAmplitudes(cutoff, psi.reshape(cutoff + 1, cutoff + 1).copy(), False)


def _seed_vector(seed, cutoff):
    if seed is None:
        return basis_state(cutoff, 1, 0)
    if callable(seed):
        return np.asarray(seed(cutoff), dtype=complex)
    n, m = seed
    return basis_state(cutoff, n, m)


def amplitudes_fock_oracle(L: float, ds: CompositeDetunings | None, params: ModelParams,
                           omega: float = 0.0, cutoff: int = 8, seed=None,
                           check_cutoff: bool = True, d_coeffs=None) -> TwoModeAmplitudes:
    """Raw amplitudes α_nm after length L for the input |1,0> (or ``seed``).

    ``seed`` may be an (n, m) pair or a callable cutoff -> state vector.  The
    cutoff is validated by repeating the evolution at cutoff + 2.
    """
    if cutoff < 4:
        raise CutoffError("cutoff must be >= 4", "quantum_state", "amplitudes_fock_oracle",
                          {"cutoff": cutoff})
    if d_coeffs is None:
        ds = derive_ds(params) if ds is None else ds
        d_coeffs = coeffs(float(omega), ds, params)
    k = float(omega) / params.c if params is not None else 0.0
    psi = evolve(d_coeffs, L, _seed_vector(seed, cutoff), cutoff, k)
    amps = _as_amplitudes(psi, cutoff)
    if check_cutoff:
        big = _as_amplitudes(evolve(d_coeffs, L, _seed_vector(seed, cutoff + 2),
                                    cutoff + 2, k), cutoff + 2)
        delta = np.max(np.abs(big.array[:cutoff + 1, :cutoff + 1] - amps.array))
        if delta >= CUTOFF_TOL:
            raise CutoffError(f"amplitudes change by {delta:.2e} at cutoff+2",
                              "quantum_state", "amplitudes_fock_oracle",
                              {"L": L, "cutoff": cutoff})
    return amps


def _log_ratio(num, den):
    if not (0 < num < 1 and 0 < den < 1):
        return math.nan
    return math.log(num) / math.log(den)


def multiphoton_ratio(z_grid, ds: CompositeDetunings | None, params: ModelParams,
                      cutoff: int = 8) -> MultiphotonSeries:
    """ln|α32| / ln|α21| along z (metres), from normalized and raw oracle amplitudes.

    Samples whose amplitudes vanish or leave (0, 1) are reported as gaps (NaN).
    """
    ds = derive_ds(params) if ds is None else ds
    d = coeffs(0.0, ds, params)
    z = np.asarray(z_grid, dtype=float)
    ratio = np.full(z.size, np.nan)
    raw = np.full(z.size, np.nan)
    gaps = []
    for i, zi in enumerate(z):
        amps = amplitudes_fock_oracle(float(zi), ds, params, cutoff=cutoff, d_coeffs=d)
        nrm = amps.normalize()
        floor = 1e-14 * np.max(np.abs(amps.array))
        if abs(amps[3, 2]) <= floor or abs(amps[2, 1]) <= floor:
            gaps.append(float(zi))
            continue
        ratio[i] = _log_ratio(abs(nrm[3, 2]), abs(nrm[2, 1]))
        raw[i] = _log_ratio(abs(amps[3, 2]), abs(amps[2, 1]))
        if math.isnan(ratio[i]):
            gaps.append(float(zi))
    return MultiphotonSeries(z, ratio, raw, 2.0, gaps)


def squeezer_ladder(strength: complex, L: float, cutoff: int = 8, nmax: int = 4):
    """Seed-referenced ladder ratios ln|α_nn/α_00| / ln|α_11/α_00| for n = 1..nmax.

    The generator is a pure two-mode squeezer (D1 = D4 = 0, D2 = strength,
    D3 = conj(strength)) acting on vacuum.
    """
    d = (0j, complex(strength), complex(strength).conjugate(), 0j)
    psi0 = basis_state(cutoff, 0, 0)
    amps = _as_amplitudes(evolve(d, L, psi0, cutoff), cutoff)
    base = abs(amps[1, 1] / amps[0, 0])
    return np.array([math.log(abs(amps[n, n] / amps[0, 0])) / math.log(base)
                     for n in range(1, nmax + 1)])


# -- single-photon-added coherent state ------------------------------------------------

def coherent_vector(alpha: complex, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff + 1)
    logfact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        c = np.zeros(cutoff + 1, dtype=complex)
        c[0] = 1.0
        return c
    return np.exp(-abs(alpha) ** 2 / 2 + n * np.log(complex(alpha)) - 0.5 * logfact)


def _spacs_core(alpha, L, d, cutoff):
    coh = coherent_vector(alpha, cutoff)
    psi0 = np.kron(coh, np.eye(cutoff + 1)[0])
    psi = evolve(d, L, psi0, cutoff)
    amps = _as_amplitudes(psi, cutoff)
    cond = amps.array[:, 1].copy()
    total = amps.norm_sq()
    prob = float(np.sum(np.abs(cond) ** 2) / total) if total > 0 else 0.0
    if prob == 0.0:
        return amps, None, 0.0, None
    cond = cond / np.linalg.norm(cond)
    ideal = np.zeros(cutoff + 1, dtype=complex)
    ideal[1:] = np.sqrt(np.arange(1, cutoff + 1)) * coh[:-1]
    ideal = ideal / np.linalg.norm(ideal)
    fid = float(abs(np.vdot(ideal, cond)) ** 2)
    return amps, cond, prob, fid


def spacs_output(alpha: complex, L: float, ds: CompositeDetunings | None, params: ModelParams,
                 cutoff: int = 8) -> SpacsResult:
    """Evolve |α>|0> and condition on one FWM photon.

    Returns the conditioned probe state, the conditioning probability and its
    fidelity with the ideal photon-added coherent state a†|α>/norm.
    """
    if abs(alpha) ** 2 > cutoff / 4:
        raise CutoffError("|alpha|^2 exceeds cutoff/4", "quantum_state", "spacs_output",
                          {"alpha": alpha, "cutoff": cutoff})
    ds = derive_ds(params) if ds is None else ds
    d = coeffs(0.0, ds, params)
    amps, cond, prob, fid = _spacs_core(alpha, L, d, cutoff)
    _, _, prob2, fid2 = _spacs_core(alpha, L, d, cutoff + 2)
    if abs(prob - prob2) > CUTOFF_TOL * max(prob, 1.0) or \
            (fid is not None and abs(fid - fid2) > CUTOFF_TOL):
        raise CutoffError("conditioned state not converged at cutoff+2", "quantum_state",
                          "spacs_output", {"alpha": alpha, "L": L, "cutoff": cutoff})
    return SpacsResult(amps, cond, prob, fid)
