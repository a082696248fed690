"""Command-line entry point: figure jobs, oracle checks, sweeps and calibration.

Exit status: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import correlation as corr
from . import dispersion as disp
from . import efficiency as eff
from . import propagation as prop
from . import quantum_state as qs
from .config import evaluate, parse_convention, params_from_mapping, parse_value, symbol_table
from .errors import ConfigError, NumericalError
from .model import MODEL_FIELDS, NOMINAL_GAMMA_HZ, ModelParams, validate
from .output import base_metadata, format_number, write_csv, write_text

log = logging.getLogger("ramanpair")

OUT_ENV = "RAMANPAIR_OUT"
JOB_KINDS = ("fig3", "fig4", "fig5", "fig6", "fig9", "fig10", "efficiency",
             "oracle-check", "sweep", "calibrate")
DEFAULT_GRIDS = {
    "fig3": {"dtp": (-40.0, 40.0, 1601)},
    "fig4": {"dtp": (-40.0, 40.0, 1601)},
    "fig5": {"z": (0.5, 5.0, 46)},
    "fig6": {"tau": (-2e-6, 2e-6, 4001)},
    "fig9": {"zeta": (-1000.0, 1000.0, 4001)},
    "fig10": {"zeta": (-1000.0, 1000.0, 4001)},
}
# job-level settings that --set may change, with defaults
JOB_KEYS = {
    "dtp": None, "L": 0.05, "K": None, "cutoff": 8, "epsilon": 1.0, "delta_t": 1e-9,
    "w0": 10e-6, "eta_s": 0.09, "a_eff_convention": "pi_w0_sq", "samples": 100,
    "seed": 20240611, "z_m": 0.01, "mode_order": "gain_first", "intensity_form": "printed",
}
STRING_KEYS = {"a_eff_convention", "mode_order", "intensity_form"}
INT_KEYS = {"cutoff", "samples", "seed"}


@dataclass
class JobSpec:
    kind: str
    config: str | None = None
    out_dir: str = "."
    overrides: dict = field(default_factory=dict)
    grids: dict = field(default_factory=dict)
    convention: float | None = None
    jobs: int = 1
    quantity: str | None = None


@dataclass
class Context:
    spec: JobSpec
    params: ModelParams
    settings: dict
    symbols: dict

    def grid(self, key):
        if key in self.spec.grids:
            return self.spec.grids[key]
        return DEFAULT_GRIDS[self.spec.kind][key]


# -- parsing -----------------------------------------------------------------------

def parse_assignment(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    k = k.strip()
    if not k:
        raise ConfigError(f"empty key in {text!r}")
    return k, v.strip()


def parse_grid(value: str, symbols: dict) -> tuple[float, float, int]:
    parts = value.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:count, got {value!r}")
    start, stop = evaluate(parts[0], symbols), evaluate(parts[1], symbols)
    try:
        count = int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"grid count must be an integer, got {parts[2]!r}") from exc
    if count < 1 or stop < start or (count > 1 and stop == start):
        raise ConfigError(f"empty grid range {value!r}")
    return (start, stop, count)


def grid_values(g):
    return np.linspace(g[0], g[1], g[2])


def resolve(spec: JobSpec) -> Context:
    doc = {}
    if spec.config:
        text = Path(spec.config).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{spec.config}: not valid JSON ({exc})") from exc
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
    settings = dict(JOB_KEYS)
    for k, v in spec.overrides.items():
        if k in MODEL_FIELDS or k == "gamma":
            doc[k] = v
        elif k not in JOB_KEYS:
            raise ConfigError(f"unknown parameter {k!r} in --set")
    conv = spec.convention
    if conv is None:
        conv = parse_convention(doc.get("angular_convention", 1.0))
    params = params_from_mapping(doc, conv)
    gamma = parse_value(doc.get("gamma", NOMINAL_GAMMA_HZ * conv), symbol_table(conv))
    symbols = symbol_table(conv, gamma, params.tau_p)
    for k, v in spec.overrides.items():
        if k not in JOB_KEYS:
            continue
        if k in STRING_KEYS:
            settings[k] = v
        elif k in INT_KEYS:
            try:
                settings[k] = int(v)
            except ValueError as exc:
                raise ConfigError(f"{k} must be an integer") from exc
        else:
            settings[k] = evaluate(v, symbols)
    if settings["dtp"] is not None:
        params = params.with_detuning(settings["dtp"])
    if settings["K"] is not None:
        params = params.with_k(settings["K"])
    return Context(spec, params, settings, symbols)


# -- jobs --------------------------------------------------------------------------

def _pool_map(fn, items, jobs):
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _grid_meta(ctx, key):
    g = ctx.grid(key)
    return (f"grid.{key}", f"{format_number(g[0])}:{format_number(g[1])}:{g[2]}")


def job_fig3(ctx: Context):
    g = ctx.grid("dtp")
    x = grid_values(g)
    tr = disp.detuning_sweep(ctx.params, x, track=True)
    pr = disp.detuning_sweep(ctx.params, x, track=False)
    c = ctx.params.c
    p0 = ctx.params.with_detuning(-1.0)
    chain = disp.group_velocities_analytic(None, p0)
    printed = disp.group_velocities_analytic(None, p0, d5p_denominator="sqrt")
    gap = max(abs(printed[i] - chain[i]) / abs(chain[i]) for i in (0, 1))
    log.info("printed-vs-chain-rule D5' group velocity deviation at dtp=-1: %.3e", gap)
    meta = base_metadata("fig3", ctx.params) + [
        _grid_meta(ctx, "dtp"),
        ("vg_route", "central finite difference with Richardson step, branch tracked along dtp"),
        ("printed_columns", "closed-form derivative with sqrt(D5) denominator, principal branch"),
        ("printed_vs_chain_rel_dev_at_dtp_-1", format_number(gap)),
        ("invalid_samples", str(int(np.sum(~tr.valid)))),
    ]
    rows = []
    for i in np.flatnonzero(tr.valid):
        rows.append((x[i], (tr.vg_plus[i] / c).real, (tr.vg_minus[i] / c).real,
                     (tr.vg_plus[i] / c).imag, (tr.vg_minus[i] / c).imag,
                     (pr.vg_plus_printed[i] / c).real, (pr.vg_minus_printed[i] / c).real))
    cols = ["dtp", "re_vg_plus_over_c", "re_vg_minus_over_c", "im_vg_plus_over_c",
            "im_vg_minus_over_c", "re_vg_plus_printed_over_c", "re_vg_minus_printed_over_c"]
    return [write_csv(Path(ctx.spec.out_dir) / "fig3.csv", meta, cols, rows)]


def merge_roots(roots, tol=1e-6):
    """Sorted roots with near-duplicates (|Δ| < tol) collapsed."""
    out = []
    for r in sorted(roots):
        if not out or r - out[-1] >= tol:
            out.append(r)
    return out


def job_fig4(ctx: Context):
    g = ctx.grid("dtp")
    x = grid_values(g)
    tr = disp.detuning_sweep(ctx.params, x, track=True)
    pr = disp.detuning_sweep(ctx.params, x, track=False)
    meta = base_metadata("fig4", ctx.params) + [
        _grid_meta(ctx, "dtp"),
        ("columns", "Re beta in 1/m; tracked = continuous branch, principal = Re D5 >= 0"),
    ]
    lo, hi = disp.gain_region_bounds(tr)
    roots = merge_roots(disp.sign_changes(pr, ctx.params, "beta_plus")
                        + disp.sign_changes(pr, ctx.params, "beta_minus"))
    meta += [("gain_region_bounds", f"{format_number(lo)} {format_number(hi)}"),
             ("re_beta_sign_changes_principal", " ".join(format_number(r) for r in roots))]
    ok = tr.valid & pr.valid
    rows = [(x[i], tr.beta_plus[i].real, tr.beta_minus[i].real, pr.beta_plus[i].real,
             pr.beta_minus[i].real) for i in np.flatnonzero(ok)]
    cols = ["dtp", "re_beta_plus", "re_beta_minus", "re_beta_plus_principal",
            "re_beta_minus_principal"]
    return [write_csv(Path(ctx.spec.out_dir) / "fig4.csv", meta, cols, rows)]


def _fig5_point(args):
    z, params, cutoff = args
    s = qs.multiphoton_ratio([z], None, params, cutoff=cutoff)
    return float(s.ratio[0]), float(s.ratio_raw[0])


def job_fig5(ctx: Context):
    zm = ctx.settings["z_m"]
    x = grid_values(ctx.grid("z"))
    res = _pool_map(_fig5_point, [(float(v * zm), ctx.params, ctx.settings["cutoff"]) for v in x],
                    ctx.spec.jobs)
    meta = base_metadata("fig5", ctx.params) + [
        _grid_meta(ctx, "z"), ("z_m", format_number(zm)),
        ("cutoff", str(ctx.settings["cutoff"])),
        ("ratio", "ln|a32|/ln|a21| from normalized oracle amplitudes; empty cell = gap"),
    ]
    rows = [(v, r[0], 2.0, r[1]) for v, r in zip(x, res)]
    return [write_csv(Path(ctx.spec.out_dir) / "fig5.csv", meta,
                      ["z_over_zm", "ratio", "reference", "ratio_raw"], rows)]


def job_fig6(ctx: Context):
    tau = grid_values(ctx.grid("tau"))
    ks = [ctx.settings["K"]] if ctx.settings["K"] is not None else [2e8, 3e9]
    files = []
    for k in ks:
        p = ctx.params.with_k(k)
        s = corr.g2_cross(tau, ctx.settings["L"], None, p)
        s = corr.coincidence_rate(corr.normalize_g2(s), ctx.settings["epsilon"],
                                  ctx.settings["delta_t"])
        try:
            width = corr.correlation_time(s)
        except NumericalError:
            width = math.nan
        meta = base_metadata("fig6", p) + [
            _grid_meta(ctx, "tau"), ("K", f"{format_number(k)} (K1 = K2 = K12 = K)"),
            ("L", format_number(ctx.settings["L"])),
            ("epsilon", format_number(ctx.settings["epsilon"])),
            ("delta_t", format_number(ctx.settings["delta_t"])),
            ("pulse_shape", "gaussian exp(-t^2/tau_p^2)"),
            ("g1_e1", format_number(s.g1_e1)), ("g1_e2", format_number(s.g1_e2)),
            ("imag_residual_rel", format_number(s.imag_residual)),
            ("correlation_time_fwhm", format_number(width)),
        ] + [(f"quadrature.{k2}", format_number(v)) for k2, v in sorted(s.info.items())
             if k2 != "pulse_rule"] + [("quadrature.pulse_rule", s.info["pulse_rule"])]
        rows = zip(tau, s.g2_raw, s.g2_norm, s.rc)
        files.append(write_csv(Path(ctx.spec.out_dir) / f"fig6_K{k:.0e}.csv", meta,
                               ["tau_d", "G2", "g2_norm", "Rc"], rows))
    return files


def _spectrum_tracked(zeta, params):
    """Eigen data along ζ with the branch continued outward from ζ = 0."""
    w = zeta / params.tau_p
    s = disp.eigen(w, None, params)
    d5 = np.array(s.d5, dtype=complex)
    i0 = int(np.argmin(np.abs(zeta)))
    d5[i0:] = disp.track_branch(d5[i0:])
    d5[:i0 + 1] = disp.track_branch(d5[:i0 + 1][::-1])[::-1]
    return disp.eigen(w, None, params, reference_d5=d5)


def job_fig9(ctx: Context):
    zeta = grid_values(ctx.grid("zeta"))
    dk = disp.stark_phase_mismatch(zeta / ctx.params.tau_p, None, ctx.params)
    g = disp.gain_spectrum(zeta / ctx.params.tau_p, None, ctx.params,
                           reference_d5=_spectrum_tracked(zeta, ctx.params).d5)
    meta = base_metadata("fig9", ctx.params) + [_grid_meta(ctx, "zeta"),
                                                ("units", "1/m; zeta = omega*tau_p")]
    rows = zip(zeta, dk, g[2])
    return [write_csv(Path(ctx.spec.out_dir) / "fig9.csv", meta,
                      ["zeta", "delta_k_shift", "g_probe"], rows)]


def job_fig10(ctx: Context):
    zeta = grid_values(ctx.grid("zeta"))
    ref = _spectrum_tracked(zeta, ctx.params).d5
    gp, gm, gpr = disp.gain_spectrum(zeta / ctx.params.tau_p, None, ctx.params, reference_d5=ref)
    meta = base_metadata("fig10", ctx.params) + [
        _grid_meta(ctx, "zeta"),
        ("units", "1/m; gain = -Im lambda; branch continued from zeta = 0")]
    return [write_csv(Path(ctx.spec.out_dir) / "fig10.csv", meta,
                      ["zeta", "g_plus", "g_minus", "g_probe"], zip(zeta, gp, gm, gpr))]


def efficiency_report(params: ModelParams, settings: dict):
    p = params if settings["dtp"] is not None else params.with_detuning(3.0)
    zf = disp.zero_freq_constants(None, p, mode_order=settings["mode_order"])
    try:
        oc = eff.rb87_constants(p, w0=settings["w0"], eta_s=settings["eta_s"],
                                a_eff_convention=settings["a_eff_convention"],
                                intensity_form=settings["intensity_form"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    bad = oc.violations()
    if bad:
        raise ConfigError("invalid optical constants: " + ", ".join(bad))
    return p, eff.conversion_efficiencies(settings["L"], zf, p, oc)


def job_efficiency(ctx: Context):
    p, rep = efficiency_report(ctx.params, ctx.settings)
    meta = base_metadata("efficiency", p) + [
        ("mode_order", ctx.settings["mode_order"]),
        ("carrier_frequencies", "omega = convention * c / lambda (794.979 nm, 780.241 nm)")]
    doc = {"meta": dict(meta), "report": json.loads(rep.to_json())}
    out = Path(ctx.spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jpath = out / "efficiency.json"
    jpath.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    tpath = write_text(out / "efficiency.txt", meta, rep.to_table())
    return [jpath, tpath]


def _oracle_point(args):
    z, zeta, params = args
    w = zeta / params.tau_p
    t = prop.transfer(z, w, None, params)
    o = prop.ode_oracle(z, w, None, params)
    dev = relative_entry_error(t.matrix(), o.matrix.matrix())
    s = disp.eigen(w, None, params)
    det = t.determinant()
    want = np.exp(1j * (s.lambda_plus + s.lambda_minus) * z)
    return dev, float(abs(det - want) / abs(want)), o.steps


def oracle_samples(n, seed, z_max=0.05, zeta_max=5.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, z_max, n), rng.uniform(-zeta_max, zeta_max, n)


def relative_entry_error(a, b):
    """Entrywise relative error; entries that vanish in the reference use the matrix scale."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = np.maximum(np.abs(b), 1e-12 * np.max(np.abs(b)))
    return float(np.max(np.abs(a - b) / scale))


def job_oracle_check(ctx: Context):
    zs, zetas = oracle_samples(ctx.settings["samples"], ctx.settings["seed"])
    res = _pool_map(_oracle_point, [(float(z), float(x), ctx.params) for z, x in zip(zs, zetas)],
                    ctx.spec.jobs)
    devs = [r[0] for r in res]
    dets = [r[1] for r in res]
    steps = [r[2] for r in res]
    body = "\n".join([
        "transfer matrix vs ODE oracle",
        f"samples: {len(res)}",
        f"z range: [0, 0.05] m; zeta range: [-5, 5]; seed: {ctx.settings['seed']}",
        f"max entrywise relative deviation: {max(devs):.6e}",
        f"oracle tolerance 1e-6: {'PASS' if max(devs) < 1e-6 else 'FAIL'}",
        f"max determinant identity error: {max(dets):.6e}",
        f"determinant tolerance 1e-9: {'PASS' if max(dets) < 1e-9 else 'FAIL'}",
        f"oracle RK4 steps (min/max): {min(steps)}/{max(steps)}",
    ])
    meta = base_metadata("oracle-check", ctx.params)
    return [write_text(Path(ctx.spec.out_dir) / "oracle_check.txt", meta, body)]


def job_calibrate(ctx: Context):
    x = grid_values(ctx.spec.grids.get("dtp", (-40.0, 40.0, 801)))
    rep = disp.calibrate_convention(ctx.params, x)
    meta = base_metadata("calibrate", None) + [
        ("grid.dtp", f"{format_number(x[0])}:{format_number(x[-1])}:{x.size}")]
    body = "\n".join(rep.summary_lines())
    return [write_text(Path(ctx.spec.out_dir) / "calibrate.txt", meta, body)]


# -- sweeps ------------------------------------------------------------------------

def _q_vg(params, settings, which):
    vgp, vgm = disp.group_velocities_fd(None, params)
    return ((vgp if which == "+" else vgm) / params.c).real


def _q_beta(params, settings, which):
    s = disp.eigen(0.0, None, params)
    return (1j * (s.lambda_plus if which == "+" else s.lambda_minus)).real


def _q_alpha20_ratio(params, settings):
    a = qs.amplitudes_fock_oracle(settings["L"], None, params, cutoff=settings["cutoff"])
    return abs(a[2, 0]) ** 2 / abs(a[2, 1]) ** 2


def _q_alpha21_oracle(params, settings):
    a = qs.amplitudes_fock_oracle(settings["L"], None, params, cutoff=settings["cutoff"])
    return abs(a.normalize()[2, 1]) ** 2


def _q_alpha21_closed(params, settings):
    zf = disp.zero_freq_constants(None, params, group_velocities=False)
    return qs.amplitudes_closed_form(settings["L"], zf).a21_sq


def _q_ratio(params, settings):
    return float(qs.multiphoton_ratio([settings["L"]], None, params,
                                      cutoff=settings["cutoff"]).ratio[0])


def _q_corr_time(params, settings):
    tau = np.linspace(-1e-6, 1e-6, 2001)
    s = corr.normalize_g2(corr.g2_cross(tau, settings["L"], None, params))
    return corr.correlation_time(s)


def _q_eta(params, settings, j):
    st = dict(settings)
    st["dtp"] = params.dtp
    _, rep = efficiency_report(params, st)
    return rep.eta_tot1_per_cm if j == 1 else rep.eta_tot2_per_cm


SWEEP_QUANTITIES = {
    "re_vg_plus_over_c": lambda p, s: _q_vg(p, s, "+"),
    "re_vg_minus_over_c": lambda p, s: _q_vg(p, s, "-"),
    "re_beta_plus": lambda p, s: _q_beta(p, s, "+"),
    "re_beta_minus": lambda p, s: _q_beta(p, s, "-"),
    "alpha20_over_alpha21": _q_alpha20_ratio,
    "alpha21_sq_oracle": _q_alpha21_oracle,
    "alpha21_sq_closed": _q_alpha21_closed,
    "multiphoton_ratio": _q_ratio,
    "correlation_time": _q_corr_time,
    "eta_tot1_per_cm": lambda p, s: _q_eta(p, s, 1),
    "eta_tot2_per_cm": lambda p, s: _q_eta(p, s, 2),
    "stark_mismatch": lambda p, s: float(disp.stark_phase_mismatch(0.0, None, p)),
}
SWEEP_AXES_EXTRA = ("dtp", "K", "L")


def _apply_axis(params, settings, key, value):
    if key == "dtp":
        return params.with_detuning(value), settings
    if key == "K":
        return params.with_k(value), settings
    if key == "L":
        s = dict(settings)
        s["L"] = value
        return params, s
    if key in ("omega1_rabi", "omega2_rabi", "k12"):
        return params.replace(**{key: complex(value)}), settings
    if key == "two_photon_detuning":
        return params.replace(two_photon_detuning=value, delta3=None), settings
    return params.replace(**{key: value}), settings


def _sweep_point(args):
    params, settings, quantity, assignment = args
    for k, v in assignment:
        params, settings = _apply_axis(params, settings, k, v)
    problems = validate(params)
    if problems:
        raise ConfigError(f"sweep point {dict(assignment)}: " + "; ".join(map(str, problems)))
    try:
        return float(SWEEP_QUANTITIES[quantity](params, settings))
    except NumericalError as exc:
        exc.sample.update(dict(assignment))
        raise


def job_sweep(ctx: Context):
    q = ctx.spec.quantity
    if q not in SWEEP_QUANTITIES:
        raise ConfigError(f"unknown sweep quantity {q!r}; choose from "
                          + ", ".join(sorted(SWEEP_QUANTITIES)))
    axes = list(ctx.spec.grids.items())
    if not 1 <= len(axes) <= 2:
        raise ConfigError("sweep needs one or two --grid axes")
    for k, _ in axes:
        if k not in (*MODEL_FIELDS, *SWEEP_AXES_EXTRA) or k in ("angular_convention", "c"):
            raise ConfigError(f"cannot sweep {k!r}")
    values = [grid_values(g) for _, g in axes]
    mesh = np.array(np.meshgrid(*values, indexing="ij")).reshape(len(axes), -1).T
    names = [k for k, _ in axes]
    items = [(ctx.params, ctx.settings, q, tuple(zip(names, map(float, row)))) for row in mesh]
    res = _pool_map(_sweep_point, items, ctx.spec.jobs)
    meta = base_metadata("sweep", ctx.params) + [("quantity", q)] + [
        (f"grid.{k}", f"{format_number(g[0])}:{format_number(g[1])}:{g[2]}") for k, g in axes]
    rows = [tuple(row) + (r,) for row, r in zip(mesh, res)]
    return [write_csv(Path(ctx.spec.out_dir) / f"sweep_{q}.csv", meta, names + [q], rows)]


JOBS = {
    "fig3": job_fig3, "fig4": job_fig4, "fig5": job_fig5, "fig6": job_fig6,
    "fig9": job_fig9, "fig10": job_fig10, "efficiency": job_efficiency,
    "oracle-check": job_oracle_check, "sweep": job_sweep, "calibrate": job_calibrate,
}


def run(spec: JobSpec) -> list[Path]:
    if spec.kind not in JOBS:
        raise ConfigError(f"unknown job {spec.kind!r}")
    ctx = resolve(spec)
    if spec.kind in DEFAULT_GRIDS:
        for k in spec.grids:
            if k not in DEFAULT_GRIDS[spec.kind]:
                raise ConfigError(f"job {spec.kind} has no grid {k!r}")
    return JOBS[spec.kind](ctx)


def build_parser() -> argparse.ArgumentParser:
    grids = "; ".join(f"{job}: " + ", ".join(f"{k}={a:g}:{b:g}:{n}" for k, (a, b, n) in g.items())
                      for job, g in DEFAULT_GRIDS.items())
    p = argparse.ArgumentParser(
        prog="ramanpair",
        description="Double-Lambda active-Raman-gain photon-pair simulator.",
        epilog=(f"Default grids: {grids}; calibrate: dtp=-40:40:801. "
                "fig5 z is in units of z_m = 1 cm; fig6 tau in seconds; fig9/fig10 zeta = "
                "omega*tau_p. Job settings for --set: " + ", ".join(sorted(JOB_KEYS))
                + f". Default output directory: ${OUT_ENV} or ./ramanpair-out."))
    p.add_argument("job", choices=JOB_KINDS)
    p.add_argument("--config", help="JSON parameter file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a parameter or job setting (repeatable)")
    p.add_argument("--grid", dest="grids", action="append", default=[],
                   metavar="KEY=START:STOP:COUNT", help="override or define a grid (repeatable)")
    p.add_argument("--convention", choices=("1", "2pi"),
                   help="angular convention for frequency-labelled values")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--quantity", help="output quantity for the sweep job: "
                   + ", ".join(sorted(SWEEP_QUANTITIES)))
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def spec_from_args(ns) -> JobSpec:
    conv = parse_convention(ns.convention) if ns.convention else None
    overrides = dict(parse_assignment(s) for s in ns.overrides)
    sym = symbol_table(conv or 1.0, NOMINAL_GAMMA_HZ * (conv or 1.0), 10e-6)
    grids = {}
    for g in ns.grids:
        k, v = parse_assignment(g)
        grids[k] = parse_grid(v, sym)
    if ns.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    out = ns.out or os.environ.get(OUT_ENV) or "ramanpair-out"
    return JobSpec(ns.job, ns.config, out, overrides, grids, conv, ns.jobs, ns.quantity)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(ns)
        files = run(spec)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc.describe()}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
