import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramanpair import dispersion as disp
from ramanpair.errors import DegenerateParameterError
from ramanpair.model import derive_ds, paper_defaults

zeta = st.floats(min_value=-40, max_value=40, allow_nan=False)
dtp = st.floats(min_value=-40, max_value=40, allow_nan=False)


def rel(a, b):
    return np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b)))


@settings(max_examples=100, deadline=None)
@given(z=zeta, x=dtp)
def test_trace_and_discriminant(z, x):
    p = paper_defaults().with_detuning(x)
    w = z / p.tau_p
    s = disp.eigen(w, None, p)
    D1, D2, D3, D4 = s.d_coeffs
    trace = 2 * w / p.c + D1 + D4
    assert abs(s.lambda_plus + s.lambda_minus - trace) <= 1e-12 * abs(trace)
    disc = (D1 - D4) ** 2 + 4 * D2 * D3
    assert abs(s.d5 ** 2 - disc) <= 1e-12 * max(abs(disc), abs(D1 - D4) ** 2)


def test_vector_matches_scalar(params):
    w = np.linspace(-5, 5, 7) / params.tau_p
    s = disp.eigen(w, None, params)
    for i, wi in enumerate(w):
        t = disp.eigen(float(wi), None, params)
        assert t.lambda_plus == pytest.approx(s.lambda_plus[i], rel=1e-14)
        assert t.u_minus == pytest.approx(s.u_minus[i], rel=1e-14)


def test_principal_branch(params):
    w = np.linspace(-40, 40, 201) / params.tau_p
    assert np.all(disp.eigen(w, None, params).d5.real >= 0)


@settings(max_examples=40, deadline=None)
@given(z=zeta, x=dtp)
def test_branch_swap(z, x):
    p = paper_defaults().with_detuning(x)
    w = z / p.tau_p
    s = disp.eigen(w, None, p)
    t = disp.eigen(w, None, p, reference_d5=-s.d5)
    assert t.lambda_plus == pytest.approx(s.lambda_minus, rel=1e-12)
    assert t.lambda_minus == pytest.approx(s.lambda_plus, rel=1e-12)
    assert t.u_plus == pytest.approx(s.u_minus, rel=1e-10)
    assert t.u_minus == pytest.approx(s.u_plus, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(min_value=-np.pi, max_value=np.pi), z=zeta)
def test_rabi_phase_invariance(theta, z):
    p = paper_defaults()
    q = p.replace(omega1_rabi=p.omega1_rabi * cmath.exp(1j * theta))
    w = z / p.tau_p
    a, b = disp.coeffs(w, None, p), disp.coeffs(w, None, q)
    assert abs(b[0]) == pytest.approx(abs(a[0]), rel=1e-12)
    assert abs(b[3]) == pytest.approx(abs(a[3]), rel=1e-12)
    assert b[1] * b[2] == pytest.approx(a[1] * a[2], rel=1e-12)
    sa, sb = disp.eigen(w, None, p), disp.eigen(w, None, q)
    assert sb.lambda_plus == pytest.approx(sa.lambda_plus, rel=1e-12)
    assert sb.lambda_minus == pytest.approx(sa.lambda_minus, rel=1e-12)


def test_single_branch_gain_equals_raman_gain(params):
    q = params.replace(k2=0.0, k12=0j)
    w = np.linspace(-40, 40, 401) / q.tau_p
    gp, gm, g_probe = disp.gain_spectrum(w, None, q)
    assert np.array_equal(gm, g_probe)
    assert np.all(g_probe > 0)


def test_decoupled_root_pinned(params):
    q = params.replace(k2=0.0, k12=0j)
    s = disp.eigen(0.3 / q.tau_p, None, q)
    D1, D2, D3, D4 = s.d_coeffs
    assert D3 == 0
    assert s.d5 == D1 - D4
    assert s.u_plus == 0 and s.u_minus == 0


def test_fd_vs_analytic_50_points():
    worst = 0.0
    used = 0
    for x in np.linspace(-40, 40, 50):
        p = paper_defaults().with_detuning(x)
        ds = derive_ds(p)
        d5 = disp.eigen(0.0, ds, p).d5
        if abs(d5) < 1e-6 * abs(disp.coeffs(0.0, ds, p)[0]):
            continue
        fd = np.array(disp.group_velocities_fd(ds, p))
        an = np.array(disp.group_velocities_analytic(ds, p))
        worst = max(worst, rel(an, fd))
        used += 1
    assert used >= 45
    assert worst < 1e-6


def test_printed_denominator_differs(params):
    chain = disp.group_velocities_analytic(None, params)
    printed = disp.group_velocities_analytic(None, params, d5p_denominator="sqrt")
    assert rel(printed, chain) > 1e-4


def test_fd_step_stability(params):
    a = np.array(disp.group_velocities_fd(None, params))
    b = np.array(disp.group_velocities_fd(None, params, h=4e-6 / params.tau_p))
    assert rel(b, a) < 1e-8


def test_degenerate_d5_raises(params):
    q = params.replace(delta1=0.0, gamma42=0.0)
    with pytest.raises(DegenerateParameterError) as err:
        disp.big_d(0.0, None, q)
    assert err.value.module == "dispersion"


def test_track_branch_continuity():
    v = np.array([1 + 0j, -1.01 + 0j, 1.02 + 0j, -1.03 + 0.01j])
    out = disp.track_branch(v)
    assert np.all(out.real > 0)


def test_tracked_sweep_is_continuous(params):
    x = np.linspace(-40, 40, 801)
    sw = disp.detuning_sweep(params, x, track=True)
    # each step keeps the nearer of the two roots
    assert np.all(np.abs(np.diff(sw.d5)) <= np.abs(sw.d5[1:] + sw.d5[:-1]))
    pr = disp.detuning_sweep(params, x, track=False)
    assert np.allclose(np.abs(sw.d5), np.abs(pr.d5))
    assert sw.valid.all()


def test_zero_freq_constants(params):
    zf = disp.zero_freq_constants(None, params)
    s = disp.eigen(0.0, None, params)
    assert zf.beta_plus == pytest.approx(1j * s.lambda_plus)
    assert zf.beta_minus == pytest.approx(1j * s.lambda_minus)
    g = disp.zero_freq_constants(None, params.with_detuning(3.0), mode_order="gain_first")
    assert g.beta_plus.real > g.beta_minus.real


def test_gain_region_bounds(params):
    sw = disp.detuning_sweep(params, np.linspace(-40, 40, 1601), track=True)
    lo, hi = disp.gain_region_bounds(sw)
    assert -12 < lo < -10 and 8 < hi < 10


def test_calibration_selects_unit_convention():
    rep = disp.calibrate_convention()
    assert rep.selected == 1.0
    assert not rep.ambiguous
    assert any("selected convention" in line for line in rep.summary_lines())


def test_match_landmarks_missing():
    dev = disp.match_landmarks([], [])
    assert all(v == 1.0 for v in dev[1].values())
