"""Pump intensities, generated peak intensities and conversion efficiencies (87Rb).

Carrier frequencies are frequency-labelled quantities (ν = c/λ), so the same
angular convention that converts the nominal decay rate is applied to them:
ω = convention · c / λ.

Generated-field intensities come in two forms.  ``"printed"`` (default) uses
the single-photon scale ħω/(2 ε0 A_eff c τ_p), which is a squared field
amplitude in V^2/m^2.  ``"si"`` converts it with I = 2 n sqrt(ε0/μ0) |E|^2 so
that it is a true intensity in W/m^2.  The pump intensities are W/m^2 in both
forms.  The arithmetic avoids ``math`` calls on dimensional quantities so that
the functions can be evaluated with unit-tagged symbols.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import scipy.constants as sc

from .dispersion import ZeroFreqConstants
from .errors import ZeroDipoleError
from .model import ModelParams

# atomic unit of electric dipole moment e*a0, CODATA 2018 (C m)
EA0 = 8.4783536255e-30
EPS0_REF = 8.85e-12          # F/m, value used for the reference efficiency numbers
MU0_REF = 4e-7 * math.pi     # H/m
LAMBDA_D1 = 794.979e-9       # 87Rb D1 line (probe transition), m
LAMBDA_D2 = 780.241e-9       # 87Rb D2 line (FWM transition), m
SPDC_INTEGRATED = 3e-8       # mm^-1 sr^-1
SPDC_COLLECTION_SR = 3.3e-5  # sr
SPDC_REALISTIC = 1e-12       # mm^-1
AEFF_CONVENTIONS = {"pi_w0_sq": 1.0, "half_pi_w0_sq": 0.5}
INTENSITY_FORMS = ("printed", "si")


@dataclass(frozen=True)
class OpticalConstants:
    eps0: float
    mu0: float
    hbar: float
    n1: float
    n2: float
    mu1: float
    mu2: float
    omega3: float
    omega4: float
    w0: float
    a_eff: float
    tau_p: float
    eta_s: float = 0.09
    a_eff_convention: str = "pi_w0_sq"
    angular_convention: float = 1.0
    c: float = sc.c
    intensity_form: str = "printed"

    def violations(self) -> list:
        out = [k for k, v in asdict(self).items()
               if isinstance(v, float) and k != "angular_convention" and not v > 0]
        if not 0 < self.eta_s <= 1:
            out.append("eta_s")
        return out


def rb87_constants(params: ModelParams | None = None, convention: float | None = None,
                   w0: float = 10e-6, a_eff_convention: str = "pi_w0_sq",
                   eta_s: float = 0.09, n1: float = 1.0, n2: float = 1.0,
                   intensity_form: str = "printed") -> OpticalConstants:
    if convention is None:
        convention = params.angular_convention if params is not None else 1.0
    tau_p = params.tau_p if params is not None else 10e-6
    if a_eff_convention not in AEFF_CONVENTIONS:
        raise ValueError(f"unknown A_eff convention {a_eff_convention!r}")
    if intensity_form not in INTENSITY_FORMS:
        raise ValueError(f"unknown intensity form {intensity_form!r}")
    a_eff = AEFF_CONVENTIONS[a_eff_convention] * math.pi * w0 ** 2
    return OpticalConstants(
        eps0=EPS0_REF, mu0=MU0_REF, hbar=sc.hbar, n1=n1, n2=n2,
        mu1=2.992 * EA0 / math.sqrt(12), mu2=4.227 * EA0 / math.sqrt(12),
        omega3=convention * sc.c / LAMBDA_D1, omega4=convention * sc.c / LAMBDA_D2,
        w0=w0, a_eff=a_eff, tau_p=tau_p, eta_s=eta_s,
        a_eff_convention=a_eff_convention, angular_convention=convention,
        intensity_form=intensity_form)


def pump_intensity(j: int, constants: OpticalConstants, params: ModelParams) -> float:
    """Undepleted pump intensity 8 n_j sqrt(ε0/μ0) |ħ Ω_j / μ_j|^2 in W/m^2."""
    if j == 1:
        n, mu, rabi = constants.n1, constants.mu1, params.omega1_rabi
    elif j == 2:
        n, mu, rabi = constants.n2, constants.mu2, params.omega2_rabi
    else:
        raise ValueError("pump index must be 1 or 2")
    if mu == 0:
        raise ZeroDipoleError("transition dipole is zero", "efficiency", "pump_intensity",
                              {"j": j})
    return 8 * n * (constants.eps0 / constants.mu0) ** 0.5 * (constants.hbar / mu) ** 2 * abs(rabi) ** 2


def reference_intensity(j: int, constants: OpticalConstants) -> float:
    """Single-photon scale ħω/(2 ε0 A_eff c τ_p) for field j, times 2 n sqrt(ε0/μ0) in SI form."""
    omega = constants.omega3 if j == 1 else constants.omega4
    scale = constants.hbar * omega / (2 * constants.eps0 * constants.a_eff * constants.c
                                      * constants.tau_p)
    if constants.intensity_form == "si":
        n = constants.n1 if j == 1 else constants.n2
        scale = 2 * n * (constants.eps0 / constants.mu0) ** 0.5 * scale
    return scale


def field_peak_intensity(mode: int, L: float, zf: ZeroFreqConstants,
                         constants: OpticalConstants) -> float:
    """Peak intensity of probe (mode 1) or FWM (mode 2) with only the β+ packet kept."""
    growth = math.exp(2 * zf.beta_plus.real * L)  # |e^{β+ L}|^2
    if mode == 1:
        return reference_intensity(1, constants) * (abs(zf.a1) ** 2 + abs(zf.a2) ** 2) * growth
    if mode == 2:
        return 2 * reference_intensity(2, constants) * abs(zf.a) ** 2 * growth
    raise ValueError("mode must be 1 or 2")


@dataclass(frozen=True)
class EfficiencyReport:
    L: float
    i_p1: float
    i_p2: float
    i_e1: float
    i_e2: float
    eta1: float
    eta2: float
    eta_tot1: float
    eta_tot2: float
    eta_tot1_per_cm: float
    eta_tot2_per_cm: float
    eta_s: float
    a_eff: float
    a_eff_convention: str
    angular_convention: float
    intensity_form: str = "printed"
    spdc_integrated: float = SPDC_INTEGRATED
    spdc_collection_sr: float = SPDC_COLLECTION_SR
    spdc_realistic: float = SPDC_REALISTIC

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_table(self) -> str:
        field_unit = "W/m^2" if self.intensity_form == "si" else "V^2/m^2"
        ratio_unit = "" if self.intensity_form == "si" else "(V^2 m^-2)/(W m^-2)"
        rows = [
            ("pump intensity I_P1", self.i_p1, "W/m^2"),
            ("pump intensity I_P2", self.i_p2, "W/m^2"),
            ("probe peak intensity I_E1(L)", self.i_e1, field_unit),
            ("FWM peak intensity I_E2(L)", self.i_e2, field_unit),
            ("ideal efficiency eta1", self.eta1, ratio_unit),
            ("ideal efficiency eta2", self.eta2, ratio_unit),
            ("total efficiency eta_tot1", self.eta_tot1, ratio_unit),
            ("total efficiency eta_tot2", self.eta_tot2, ratio_unit),
            ("eta_tot1 per cm", self.eta_tot1_per_cm, "1/cm"),
            ("eta_tot2 per cm", self.eta_tot2_per_cm, "1/cm"),
            ("SPDC integrated (reference)", self.spdc_integrated, "1/(mm sr)"),
            ("SPDC collection angle (reference)", self.spdc_collection_sr, "sr"),
            ("SPDC realistic (reference)", self.spdc_realistic, "1/mm"),
        ]
        width = max(len(r[0]) for r in rows)
        lines = [f"L = {self.L:.6g} m, A_eff = {self.a_eff:.6g} m^2 ({self.a_eff_convention}), "
                 f"eta_s = {self.eta_s:g}, angular convention = "
                 f"{'1' if math.isclose(self.angular_convention, 1.0) else '2pi'}, "
                 f"intensity form = {self.intensity_form}"]
        lines += [f"{name:<{width}}  {val:.6e} {unit}".rstrip() for name, val, unit in rows]
        return "\n".join(lines)


def conversion_efficiencies(L: float, zf: ZeroFreqConstants, params: ModelParams,
                            constants: OpticalConstants | None = None) -> EfficiencyReport:
    """η_j = I_Ej(L)/I_Pj(0), η_tot_j = η_j η_s, and the per-cm values η_tot_j / (L in cm)."""
    constants = constants or rb87_constants(params)
    i_p1 = pump_intensity(1, constants, params)
    i_p2 = pump_intensity(2, constants, params)
    i_e1 = field_peak_intensity(1, L, zf, constants)
    i_e2 = field_peak_intensity(2, L, zf, constants)
    eta1 = i_e1 / i_p1 if i_p1 != 0 else math.inf
    eta2 = i_e2 / i_p2 if i_p2 != 0 else math.inf
    tot1 = eta1 * constants.eta_s
    tot2 = eta2 * constants.eta_s
    l_cm = L * 100.0
    return EfficiencyReport(
        L=L, i_p1=i_p1, i_p2=i_p2, i_e1=i_e1, i_e2=i_e2, eta1=eta1, eta2=eta2,
        eta_tot1=tot1, eta_tot2=tot2,
        eta_tot1_per_cm=tot1 / l_cm if l_cm > 0 else math.nan,
        eta_tot2_per_cm=tot2 / l_cm if l_cm > 0 else math.nan,
        eta_s=constants.eta_s, a_eff=constants.a_eff,
        a_eff_convention=constants.a_eff_convention,
        angular_convention=constants.angular_convention,
        intensity_form=constants.intensity_form)
