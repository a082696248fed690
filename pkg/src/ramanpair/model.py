"""Physical parameters of the double-Lambda medium and the composite detunings.

All frequencies are stored as angular frequencies in rad/s.  The
``angular_convention`` field records the factor (1 or 2π) that was applied to
frequency-labelled inputs such as "10 MHz" when the parameters were built, so
that every output can state which reading of the nominal rates it used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

SPEED_OF_LIGHT = 299_792_458.0
NOMINAL_GAMMA_HZ = 1.0e7  # "10 MHz" reference decay rate
CONVENTIONS = (1.0, 2.0 * math.pi)


@dataclass(frozen=True)
class ModelParams:
    """Immutable parameter set for the four-level medium.

    ``delta3`` may be left as ``None``; it is then derived from
    ``delta1 + two_photon_detuning``.  ``k_tolerance`` is the relative
    tolerance used when checking |K12|^2 against K1*K2.
    """

    omega1_rabi: complex
    omega2_rabi: complex
    delta1: float
    delta4: float
    two_photon_detuning: float
    gamma21: float
    gamma31: float
    gamma32: float
    gamma41: float
    gamma42: float
    gamma43: float
    k1: float
    k2: float
    k12: complex
    tau_p: float
    delta3: float | None = None
    c: float = SPEED_OF_LIGHT
    angular_convention: float = 1.0
    k_tolerance: float = 1e-6

    @property
    def resolved_delta3(self) -> float:
        if self.delta3 is None:
            return self.delta1 + self.two_photon_detuning
        return self.delta3

    @property
    def delta2(self) -> float:
        return self.two_photon_detuning + self.delta4

    @property
    def dtp(self) -> float:
        """Two-photon detuning in units of 1/tau_p."""
        return self.two_photon_detuning * self.tau_p

    def replace(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def with_detuning(self, dtp: float) -> "ModelParams":
        """Copy with Δ = dtp/τ_p and δ3 re-derived from δ1 + Δ."""
        return replace(self, two_photon_detuning=dtp / self.tau_p, delta3=None)

    def with_k(self, k: float) -> "ModelParams":
        """Copy with K1 = K2 = K12 = k."""
        return replace(self, k1=k, k2=k, k12=k)

    def single_lambda(self) -> "ModelParams":
        """Copy with the second Raman branch switched off (Ω2 = K2 = K12 = 0)."""
        return replace(self, omega2_rabi=0.0, k2=0.0, k12=0.0)

    def empty_medium(self) -> "ModelParams":
        return replace(self, k1=0.0, k2=0.0, k12=0.0)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class CompositeDetunings:
    d1: complex
    d2: complex
    d3: complex
    d4: complex
    d5: complex


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


def derive_ds(params: ModelParams) -> CompositeDetunings:
    return CompositeDetunings(
        d1=complex(params.delta1, params.gamma21),
        d2=complex(params.two_photon_detuning, params.gamma31),
        d3=complex(params.resolved_delta3, -params.gamma32),
        d4=complex(params.delta4, params.gamma41),
        d5=complex(params.delta1, params.gamma42),
    )


def paper_defaults(convention: float = 1.0, dtp: float = -1.0) -> ModelParams:
    """Reference parameter set of the group-velocity study.

    gamma = convention * 10^7 rad/s; |Ω1| = gamma, |Ω2| = 5 gamma, δ1 = 100 gamma,
    δ4 = 0.1 gamma, γ31 = 3e-5 gamma, γ42 = 2 gamma, all other dephasings gamma,
    K1 = K2 = K12 = 1e9 /(m s), τ_p = 10 μs and Δ = dtp/τ_p.
    """
    if not any(math.isclose(convention, cv) for cv in CONVENTIONS):
        raise ValueError(f"angular convention must be 1 or 2*pi, got {convention!r}")
    g = convention * NOMINAL_GAMMA_HZ
    tau_p = 10e-6
    return ModelParams(
        omega1_rabi=complex(g),
        omega2_rabi=complex(5.0 * g),
        delta1=100.0 * g,
        delta4=0.1 * g,
        two_photon_detuning=dtp / tau_p,
        gamma21=g,
        gamma31=3e-5 * g,
        gamma32=g,
        gamma41=g,
        gamma42=2.0 * g,
        gamma43=g,
        k1=1e9,
        k2=1e9,
        k12=1e9,
        tau_p=tau_p,
        angular_convention=convention,
    )


def validate(params: ModelParams) -> list[Violation]:
    out = []
    for name in ("gamma21", "gamma31", "gamma32", "gamma41", "gamma42", "gamma43"):
        v = getattr(params, name)
        if not (v >= 0.0):
            out.append(Violation(name, "dephasing rate must be >= 0"))
    if not (params.tau_p > 0.0):
        out.append(Violation("tau_p", "pulse duration must be > 0"))
    if not (params.c > 0.0):
        out.append(Violation("c", "speed of light must be > 0"))
    if not any(math.isclose(params.angular_convention, cv) for cv in CONVENTIONS):
        out.append(Violation("angular_convention", "must be 1 or 2*pi"))
    if params.delta3 is not None:
        want = params.delta1 + params.two_photon_detuning
        scale = max(abs(params.delta3), abs(want))
        if abs(params.delta3 - want) > 1e-12 * scale:
            out.append(Violation("delta3", "must equal delta1 + two_photon_detuning"))
    k12sq = abs(params.k12) ** 2
    k1k2 = params.k1 * params.k2
    scale = max(k12sq, abs(k1k2))
    if scale > 0 and abs(k12sq - k1k2) > params.k_tolerance * scale:
        out.append(Violation("k12", "|K12|^2 must match K1*K2 within k_tolerance"))
    for name in ("k1", "k2"):
        if getattr(params, name) < 0:
            out.append(Violation(name, "coupling constant must be >= 0"))
    for f in fields(params):
        v = getattr(params, f.name)
        if isinstance(v, (int, float, complex)) and not _finite(v):
            out.append(Violation(f.name, "must be finite"))
    return out


def _finite(v) -> bool:
    v = complex(v)
    return math.isfinite(v.real) and math.isfinite(v.imag)


MODEL_FIELDS = tuple(f.name for f in fields(ModelParams))
COMPLEX_FIELDS = ("omega1_rabi", "omega2_rabi", "k12")
