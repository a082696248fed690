import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramanpair import dispersion as disp
from ramanpair import quantum_state as qs
from ramanpair.errors import CutoffError, GeneratorMismatchError
from ramanpair.model import paper_defaults

length = st.floats(min_value=1e-3, max_value=0.05, allow_nan=False)


def weak_gain_pair(L, params):
    zf = disp.zero_freq_constants(None, params, group_velocities=False)
    closed = qs.amplitudes_closed_form(L, zf)
    oracle = qs.amplitudes_fock_oracle(L, None, params)
    return closed, oracle


@settings(max_examples=15, deadline=None)
@given(L=length, x=st.floats(min_value=-8, max_value=6))
def test_amplitude_pattern(L, x):
    p = paper_defaults().with_detuning(x)
    amps = qs.amplitudes_fock_oracle(L, None, p)
    n, m = np.indices(amps.array.shape)
    off = amps.array[(n - m) != 1]
    assert np.max(np.abs(off)) <= 1e-12


@settings(max_examples=15, deadline=None)
@given(L=length)
def test_normalization(L):
    amps = qs.amplitudes_fock_oracle(L, None, paper_defaults()).normalize()
    assert amps.normalized
    assert abs(amps.norm_sq() - 1.0) <= 1e-10


@pytest.mark.parametrize("L", [0.005, 0.01, 0.02, 0.05])
def test_weak_gain_consistency(params, L):
    closed, oracle = weak_gain_pair(L, params)
    above = oracle.normalize().population_above(3)
    assert above < 1e-3
    assert abs(closed.raw_a21_sq - abs(oracle[2, 1]) ** 2) <= 0.05 * abs(oracle[2, 1]) ** 2


@pytest.mark.parametrize("L", [0.005, 0.02, 0.05])
def test_phase_consistency(params, L):
    closed, oracle = weak_gain_pair(L, params)
    phi_oracle = cmath.phase(oracle[2, 1] * oracle[1, 0].conjugate())
    diff = (closed.phi - phi_oracle + math.pi) % (2 * math.pi) - math.pi
    assert abs(diff) < 1e-2


def test_alpha20_suppression_monotone(params):
    ratios = []
    for o2 in np.linspace(1, 10, 10) * 1e7:
        amps = qs.amplitudes_fock_oracle(0.03, None, params.replace(omega2_rabi=complex(o2)))
        ratios.append(abs(amps[2, 0]) ** 2 / abs(amps[2, 1]) ** 2)
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))
    assert max(ratios) < 1e-2


def test_closed_form_summary(params):
    zf = disp.zero_freq_constants(None, params, group_velocities=False)
    s = qs.amplitudes_closed_form(0.05, zf)
    assert s.a10_sq + s.a21_sq == pytest.approx(1.0)
    assert s.heralded_pair_prob == pytest.approx(s.a21_sq / 2)
    h = qs.herald_pair(s)
    assert abs(h.amplitudes[0]) ** 2 + abs(h.amplitudes[1]) ** 2 == pytest.approx(1.0)
    assert cmath.phase(h.amplitudes[1]) == pytest.approx(-s.phi)


def test_generator_commutators(params):
    d = disp.coeffs(0.0, None, params)
    h = qs.generator(d, 6)
    assert qs.verify_generator(h, d, 6) < 1e-12
    wrong = (d[0], d[1], -d[2], d[3])
    assert qs.verify_generator(qs.generator(wrong, 6), d, 6) > 1e-3


def test_series_matches_expm(params):
    d = disp.coeffs(0.0, None, params)
    psi0 = qs.basis_state(8, 1, 0)
    a = qs.evolve(d, 1e-3, psi0, 8)
    b = qs.series_evolve(d, 1e-3, psi0, 8, order=6)
    assert np.max(np.abs(a - b)) < 1e-12


def test_cutoff_check(params):
    with pytest.raises(CutoffError):
        qs.amplitudes_fock_oracle(0.01, None, params, cutoff=3)
    # very strong squeezing leaks out of the truncated space
    strong = params.with_k(1e12)
    with pytest.raises(CutoffError) as err:
        qs.amplitudes_fock_oracle(0.05, None, strong, cutoff=4)
    assert err.value.module == "quantum_state"


def test_generator_mismatch_is_reported(monkeypatch, params):
    monkeypatch.setattr(qs, "verify_generator", lambda *a, **k: 1.0)
    with pytest.raises(GeneratorMismatchError):
        qs.amplitudes_fock_oracle(0.01, None, params)


def test_squeezer_ladder_exact():
    r = qs.squeezer_ladder(0.1, 1.0, cutoff=8, nmax=4)
    assert np.max(np.abs(r - np.arange(1, 5))) <= 1e-8


def test_multiphoton_ratio_above_square_law(params):
    s = qs.multiphoton_ratio([0.01, 0.03], None, params)
    assert np.all(np.isfinite(s.ratio))
    assert np.all(s.ratio > 1.5)
    assert s.gaps == []


def test_spacs(params):
    r = qs.spacs_output(0.5, 0.05, None, params)
    assert r.fidelity > 0.999
    assert 0 < r.probability < 1e-2
    vac = qs.spacs_output(0.0, 0.05, None, params)
    assert vac.fidelity == pytest.approx(1.0)
    with pytest.raises(CutoffError):
        qs.spacs_output(2.0, 0.05, None, params, cutoff=8)


def test_coherent_vector_norm():
    v = qs.coherent_vector(1.0, 20)
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-10)
