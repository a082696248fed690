import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramanpair.config import (dump_params, evaluate, load_params, params_from_mapping,
                              parse_convention, symbol_table)
from ramanpair.errors import ConfigError
from ramanpair.model import MODEL_FIELDS, paper_defaults

pos = st.floats(min_value=1e-3, max_value=1e12, allow_nan=False, allow_infinity=False)
real = st.floats(min_value=-1e12, max_value=1e12, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(o1=real, o1i=real, d1=real, d4=real, dl=real, g=st.tuples(pos, pos, pos, pos, pos, pos),
       k=pos, tau=pos, conv=st.sampled_from(["1", "2pi"]), with_d3=st.booleans())
def test_round_trip_bit_exact(tmp_path_factory, o1, o1i, d1, d4, dl, g, k, tau, conv, with_d3):
    p = paper_defaults(parse_convention(conv)).replace(
        omega1_rabi=complex(o1, o1i), delta1=d1, delta4=d4, two_photon_detuning=dl,
        gamma21=g[0], gamma31=g[1], gamma32=g[2], gamma41=g[3], gamma42=g[4], gamma43=g[5],
        k1=k, k2=k, k12=complex(k), tau_p=tau, delta3=(d1 + dl) if with_d3 else None)
    path = tmp_path_factory.mktemp("cfg") / "p.json"
    path.write_text(dump_params(p))
    q = load_params(path)
    for name in MODEL_FIELDS:
        a, b = getattr(p, name), getattr(q, name)
        assert type(a) is type(b) or name in ("k12", "omega1_rabi", "omega2_rabi")
        assert a == b, name


def test_expression_grammar():
    sym = symbol_table(2 * math.pi, 2 * math.pi * 1e7, 1e-5)
    assert evaluate("100*gamma", sym) == pytest.approx(2 * math.pi * 1e9)
    assert evaluate("10 MHz", sym) == pytest.approx(2 * math.pi * 1e7)
    assert evaluate("-1/tau_p", sym) == pytest.approx(-1e5)
    assert evaluate("5 cm", sym) == pytest.approx(0.05)
    assert evaluate("2**3 + (1 - 3)", sym) == 6.0


@pytest.mark.parametrize("expr", ["", "__import__('os')", "gamma.real", "foo*2", "1/0",
                                  "[1, 2]", "1 +"])
def test_expression_rejects(expr):
    with pytest.raises(ConfigError):
        evaluate(expr, symbol_table(1.0, 1e7, 1e-5))


def test_units_of_gamma_follow_convention():
    a = params_from_mapping({"delta1": "100*gamma"}, 1.0)
    b = params_from_mapping({"delta1": "100*gamma"}, 2 * math.pi)
    assert b.delta1 / a.delta1 == pytest.approx(2 * math.pi)
    c = params_from_mapping({"angular_convention": "2pi", "gamma": "5 MHz",
                             "delta1": "gamma"})
    assert c.delta1 == pytest.approx(2 * math.pi * 5e6)


def test_complex_forms():
    a = params_from_mapping({"omega1_rabi": {"re": "gamma", "im": 0}})
    b = params_from_mapping({"omega1_rabi": ["gamma", "0"]})
    assert a.omega1_rabi == b.omega1_rabi == 1e7 + 0j


def test_missing_fields_default():
    assert params_from_mapping({}) == paper_defaults()


@pytest.mark.parametrize("doc", [
    {"nonsense": 1}, {"gamma21": "-gamma"}, {"delta1": True}, {"k12": "3e9"},
    {"angular_convention": 3}, {"delta3": 1.0}, [],
])
def test_bad_documents(doc):
    with pytest.raises(ConfigError):
        params_from_mapping(doc)


def test_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_params(p)


def test_dump_is_plain_json(params):
    doc = json.loads(dump_params(params))
    assert set(doc) == set(MODEL_FIELDS)
