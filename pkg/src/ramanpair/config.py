"""JSON configuration reader and writer for :class:`ModelParams`.

Grammar of a config document (a flat JSON object)::

    {
      "angular_convention": 1 | "2pi",        # factor for frequency-labelled values
      "gamma": "10 MHz",                      # reference rate, usable in expressions
      "<ModelParams field>": <value>, ...
    }

A ``<value>`` is either a JSON number, read as an absolute SI quantity
(rad/s, s, m, 1/(m s)), or a string holding an arithmetic expression.
Expressions may use numbers, ``+ - * / **``, parentheses and these symbols:

* ``gamma`` and ``tau_p``: the resolved reference rate and pulse duration
* ``Hz kHz MHz GHz``: frequency labels, multiplied by the angular convention
* ``s ms us ns``, ``m cm mm um nm``: plain SI scalings
* ``pi``

Complex fields (Rabi frequencies, K12) also accept ``{"re": v, "im": v}`` or a
two-element list.  ``delta3`` may be ``null`` (derived from δ1 + Δ).  Fields
that are absent fall back to the reference parameter set under the selected
convention.
"""

from __future__ import annotations

import ast
import json
import math
import operator
from dataclasses import fields
from pathlib import Path

from .errors import ConfigError
from .model import (
    COMPLEX_FIELDS,
    MODEL_FIELDS,
    NOMINAL_GAMMA_HZ,
    ModelParams,
    paper_defaults,
    validate,
)

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FREQ_UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}
_PLAIN_UNITS = {
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9,
    "m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "nm": 1e-9,
    "pi": math.pi,
}


def parse_convention(value) -> float:
    if isinstance(value, str):
        key = value.replace(" ", "").lower()
        if key in ("1", "1.0"):
            return 1.0
        if key in ("2pi", "2*pi", "6.283185307179586"):
            return 2.0 * math.pi
        raise ConfigError(f"angular_convention must be 1 or 2pi, got {value!r}")
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        for cv in (1.0, 2.0 * math.pi):
            if math.isclose(value, cv):
                return cv
    raise ConfigError(f"angular_convention must be 1 or 2pi, got {value!r}")


def symbol_table(convention: float, gamma: float | None = None, tau_p: float | None = None) -> dict:
    table = dict(_PLAIN_UNITS)
    table.update({k: v * convention for k, v in _FREQ_UNITS.items()})
    if gamma is not None:
        table["gamma"] = gamma
    if tau_p is not None:
        table["tau_p"] = tau_p
    return table


def evaluate(expr: str, symbols: dict) -> float:
    """Evaluate a restricted arithmetic expression.

    Juxtaposition of a number and a unit ("10 MHz") is read as a product.
    """
    text = expr.strip()
    if not text:
        raise ConfigError("empty expression")
    parts = text.split()
    if len(parts) == 2 and parts[1] in symbols:
        text = f"({parts[0]})*{parts[1]}"
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {expr!r}") from exc

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id not in symbols:
                raise ConfigError(f"unknown symbol {node.id!r} in {expr!r}")
            return symbols[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](walk(node.operand))
        raise ConfigError(f"unsupported syntax in {expr!r}")

    try:
        return float(walk(tree))
    except ZeroDivisionError as exc:
        raise ConfigError(f"division by zero in {expr!r}") from exc


def parse_value(raw, symbols: dict, allow_complex=False):
    if isinstance(raw, bool):
        raise ConfigError(f"boolean is not a valid quantity: {raw!r}")
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        return evaluate(raw, symbols)
    if allow_complex:
        if isinstance(raw, dict) and set(raw) <= {"re", "im"}:
            return complex(parse_value(raw.get("re", 0.0), symbols),
                           parse_value(raw.get("im", 0.0), symbols))
        if isinstance(raw, (list, tuple)) and len(raw) == 2:
            return complex(parse_value(raw[0], symbols), parse_value(raw[1], symbols))
    raise ConfigError(f"cannot interpret value {raw!r}")


def params_from_mapping(doc: dict, convention: float | None = None) -> ModelParams:
    """Build validated parameters from a parsed config mapping.

    ``convention`` (if given) overrides the document's ``angular_convention``.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    allowed = set(MODEL_FIELDS) | {"gamma"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if convention is None:
        convention = parse_convention(doc.get("angular_convention", 1.0))
    base = paper_defaults(convention)
    sym = symbol_table(convention)
    gamma = parse_value(doc.get("gamma", NOMINAL_GAMMA_HZ * convention), sym)
    sym["gamma"] = gamma
    tau_p = parse_value(doc.get("tau_p", base.tau_p), sym)
    sym["tau_p"] = tau_p

    values = {}
    for f in fields(ModelParams):
        name = f.name
        if name == "angular_convention":
            values[name] = convention
            continue
        if name not in doc:
            values[name] = getattr(base, name)
            continue
        raw = doc[name]
        if name == "delta3" and raw is None:
            values[name] = None
            continue
        v = parse_value(raw, sym, allow_complex=name in COMPLEX_FIELDS)
        values[name] = complex(v) if name in COMPLEX_FIELDS else v
    values["tau_p"] = tau_p
    params = ModelParams(**values)
    problems = validate(params)
    if problems:
        raise ConfigError("invalid parameters: " + "; ".join(map(str, problems)))
    return params


def load_params(path, convention: float | None = None) -> ModelParams:
    try:
        text = Path(path).read_text()
    except OSError:
        raise
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return params_from_mapping(doc, convention)


def params_to_mapping(params: ModelParams) -> dict:
    out = {}
    for f in fields(ModelParams):
        v = getattr(params, f.name)
        if f.name in COMPLEX_FIELDS:
            v = complex(v)
            out[f.name] = {"re": v.real, "im": v.imag}
        else:
            out[f.name] = v
    return out


def dump_params(params: ModelParams) -> str:
    """Serialize to the config format; floats use repr so re-reading is exact."""
    return json.dumps(params_to_mapping(params), indent=2)
