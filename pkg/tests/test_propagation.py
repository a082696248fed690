import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramanpair import dispersion as disp
from ramanpair import propagation as prop
from ramanpair.errors import ConvergenceError
from ramanpair.model import paper_defaults

length = st.floats(min_value=0.0, max_value=0.05, allow_nan=False)
zeta = st.floats(min_value=-40.0, max_value=40.0, allow_nan=False)


def rel(a, b):
    return float(np.max(np.abs(a - b) / np.abs(b)))


@settings(max_examples=100, deadline=None)
@given(z1=length, z2=length, z=zeta)
def test_semigroup(z1, z2, z):
    p = paper_defaults()
    w = z / p.tau_p
    a = prop.transfer(z1, w, None, p).matrix()
    b = prop.transfer(z2, w, None, p).matrix()
    c = prop.transfer(z1 + z2, w, None, p).matrix()
    scale = np.max(np.abs(c))
    assert np.max(np.abs(b @ a - c)) <= 1e-9 * scale


@settings(max_examples=100, deadline=None)
@given(z=length, x=zeta)
def test_determinant_identity(z, x):
    p = paper_defaults()
    w = x / p.tau_p
    t = prop.transfer(z, w, None, p)
    s = disp.eigen(w, None, p)
    want = np.exp(1j * (s.lambda_plus + s.lambda_minus) * z)
    assert abs(t.determinant() - want) <= 1e-9 * abs(want)


@settings(max_examples=60, deadline=None)
@given(z=length, x=zeta)
def test_branch_swap_invariance(z, x):
    p = paper_defaults()
    w = x / p.tau_p
    s = disp.eigen(w, None, p)
    a = prop.transfer(z, w, None, p).matrix()
    b = prop.transfer(z, w, None, p, reference_d5=-s.d5).matrix()
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))


def test_identity_at_zero_length(params):
    t = prop.transfer(0.0, np.linspace(-1e5, 1e5, 5), None, params)
    assert np.array_equal(t.matrix(), np.broadcast_to(np.eye(2), (5, 2, 2)))


def test_oracle_agreement_sample(params):
    rng = np.random.default_rng(7)
    for z, x in zip(rng.uniform(0, 0.05, 5), rng.uniform(-5, 5, 5)):
        w = x / params.tau_p
        t = prop.transfer(z, w, None, params).matrix()
        o = prop.ode_oracle(z, w, None, params).matrix.matrix()
        assert rel(t, o) < 1e-6


def test_oracle_reports_nonconvergence(params):
    with pytest.raises(ConvergenceError) as err:
        prop.ode_oracle(0.05, 0.0, None, params, steps=2, tol=1e-16, max_doublings=1)
    assert err.value.operation == "ode_oracle"
    assert "z" in err.value.sample


def test_decoupled_media_exact(params):
    # K2 = K12 = 0: FWM decouples and R2 vanishes, R1 is the bare probe factor
    q = params.replace(k2=0.0, k12=0j)
    w = 0.7 / q.tau_p
    t = prop.transfer(0.02, w, None, q)
    D1 = disp.coeffs(w, None, q)[0]
    assert t.r2 == 0
    assert t.r1 == pytest.approx(np.exp(1j * (w / q.c + D1) * 0.02), rel=1e-14)
    o = prop.ode_oracle(0.02, w, None, q).matrix.matrix()
    assert np.allclose(t.matrix(), o, rtol=1e-8, atol=1e-12)


def test_short_length_accuracy(params):
    # expm1 form keeps the off-diagonal entries accurate as z -> 0
    z = 1e-12
    t = prop.transfer(z, 0.0, None, params)
    D2 = disp.coeffs(0.0, None, params)[1]
    assert t.s1 == pytest.approx(1j * D2 * z, rel=1e-6)


def test_overflow_flag(params):
    t = prop.transfer(1e4, 0.0, None, params)
    assert t.overflow


def test_envelope_at_entrance(params):
    zf = disp.zero_freq_constants(None, params)
    t = np.linspace(-3e-5, 3e-5, 7)
    env = prop.envelope_adiabatic(0.0, t, lambda x: prop.gaussian_profile(x, params.tau_p), zf)
    assert np.allclose(env.e2, 0.0, atol=1e-14)
    assert np.allclose(env.e1, (zf.a1 - zf.a3) * np.exp(-(t / params.tau_p) ** 2))


def test_envelope_delay(params):
    zf = disp.zero_freq_constants(None, params)
    t = np.linspace(-5e-5, 5e-4, 20001)
    env = prop.envelope_adiabatic(0.05, t, lambda x: prop.gaussian_profile(x, params.tau_p), zf)
    peak = t[np.argmax(np.abs(env.e2))]
    delays = [0.05 / zf.vg_plus.real, 0.05 / zf.vg_minus.real]
    assert min(abs(peak - d) for d in delays) < 0.2 * params.tau_p
