"""JSON spec files, solution/trace JSON and the values CSV.

Spec file fields: ``states``, ``generator`` (row-major), ``beta``, ``psi``,
``phi`` and optionally ``init`` (``"strict"``/``"weak"``) and ``arithmetic``
(``"float"``/``"rational"``).  Numbers may be JSON numbers or strings such as
``"60/11"``.  Output floats use Python's shortest round-trip repr, exact
values are written as ``"p/q"`` strings and sets are lists of state labels
in state order.  Nothing time-dependent is written, so reruns are
byte-identical.
"""
import csv
import io
import json
import re
from fractions import Fraction

from . import numeric
from .ctmc import StateSpace, validate_generator
from .errors import InvalidGame, InvalidGenerator, SpecFileError
from .resolvent import GameSpec

__all__ = [
    "parse_spec_text",
    "parse_spec_file",
    "spec_to_dict",
    "write_spec_file",
    "solution_to_dict",
    "trace_to_dict",
    "values_csv",
    "load_solution",
    "dumps",
]

_FIELDS = ("states", "generator", "beta", "psi", "phi")
_OPTIONAL = {"init": ("strict", "weak"), "arithmetic": ("float", "rational")}


def _line_of(text, field):
    m = re.search(r'"%s"\s*:' % re.escape(field), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _number(v, exact, field, text):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise SpecFileError(f"expected a number, got {v!r}", field, _line_of(text, field))
    try:
        q = numeric.to_fraction(v)
    except (ValueError, ZeroDivisionError):
        raise SpecFileError(f"cannot parse number {v!r}", field, _line_of(text, field)) from None
    return q if exact else float(q) if isinstance(v, str) else float(v)


def parse_spec_text(text):
    """Parse spec-file JSON text.  Returns ``(spec, init, arithmetic)``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise SpecFileError("top level must be a JSON object", line=1)
    for f in _FIELDS:
        if f not in data:
            raise SpecFileError(f"missing field {f!r}", f)
    unknown = sorted(set(data) - set(_FIELDS) - set(_OPTIONAL))
    if unknown:
        raise SpecFileError(f"unknown field {unknown[0]!r}", unknown[0], _line_of(text, unknown[0]))
    opts = {}
    for f, allowed in _OPTIONAL.items():
        v = data.get(f, allowed[0])
        if v not in allowed:
            raise SpecFileError(f"{f} must be one of {list(allowed)}, got {v!r}", f, _line_of(text, f))
        opts[f] = v
    exact = opts["arithmetic"] == "rational"

    states = data["states"]
    if not isinstance(states, list) or not states:
        raise SpecFileError("states must be a nonempty list", "states", _line_of(text, "states"))
    try:
        space = StateSpace(tuple(states))
    except ValueError as exc:
        raise SpecFileError(str(exc), "states", _line_of(text, "states")) from None
    n = len(space)

    def vector(f):
        v = data[f]
        if not isinstance(v, list) or len(v) != n:
            raise SpecFileError(f"{f} must be a list of {n} numbers", f, _line_of(text, f))
        return [_number(a, exact, f, text) for a in v]

    G = data["generator"]
    if not isinstance(G, list) or len(G) != n or any(not isinstance(r, list) or len(r) != n for r in G):
        raise SpecFileError(f"generator must be a {n}x{n} list of rows", "generator",
                            _line_of(text, "generator"))
    rows = [[_number(a, exact, "generator", text) for a in r] for r in G]
    beta = _number(data["beta"], exact, "beta", text)
    psi, phi = vector("psi"), vector("phi")

    entries = numeric.as_array(rows, exact=exact)
    try:
        gen = validate_generator(entries, exact=exact)
    except InvalidGenerator as exc:
        exc.field = "generator"
        raise
    try:
        spec = GameSpec(states=space, Q=gen, beta=beta, psi=psi, phi=phi)
    except InvalidGame as exc:
        exc.field = "beta" if "beta" in str(exc) else "psi/phi"
        raise
    return spec, opts["init"], opts["arithmetic"]


def parse_spec_file(path):
    """Read and validate a spec file; see :func:`parse_spec_text`."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_spec_text(text)


def _num(v):
    if isinstance(v, Fraction):
        return str(v)
    return float(v)


def _vec(values):
    return [_num(v) for v in values]


def _labels(spec, members):
    return [spec.states.labels[x] for x in sorted(members)]


def _render(obj, depth):
    pad = "  " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_render(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * depth + "}"
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        items = [pad + _render(v, depth + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * depth + "]"
    # flat lists (vectors, matrix rows, label sets) stay on one line
    return json.dumps(obj, ensure_ascii=False, allow_nan=False)


def dumps(obj):
    """Deterministic JSON text: nested containers indented, flat lists inline."""
    return _render(obj, 0) + "\n"


def spec_to_dict(spec, init="strict"):
    return {
        "states": list(spec.states.labels),
        "generator": [_vec(row) for row in spec.Q.entries],
        "beta": _num(spec.beta),
        "psi": _vec(spec.psi),
        "phi": _vec(spec.phi),
        "init": init,
        "arithmetic": "rational" if spec.exact else "float",
    }


def write_spec_file(path, spec, init="strict"):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(spec_to_dict(spec, init)))


def solution_to_dict(spec, sol):
    eq = spec.equal_set()
    return {
        "states": list(spec.states.labels),
        "arithmetic": "rational" if spec.exact else "float",
        "mode": sol.mode.value,
        "value": _vec(sol.value),
        "sup_stop": _labels(spec, sol.sup_stop),
        "inf_stop": _labels(spec, sol.inf_stop),
        "equal_set": _labels(spec, eq),
        "shortcut_used": sol.shortcut_used,
        "outer_iterations": sol.outer_iterations,
        "total_inner_steps": sol.trace.total_inner_steps,
        "iterations": [
            {"k": rec.k, "S": _labels(spec, rec.inf_set), "D": _labels(spec, rec.sup_set)}
            for rec in sol.trace.outer
        ],
    }


def trace_to_dict(spec, sol):
    v0 = sol.trace.v0_result
    return {
        "states": list(spec.states.labels),
        "mode": sol.mode.value,
        "V0": {
            "stop_set": _labels(spec, v0.stop_set),
            "value": _vec(v0.value),
            "inner": [_labels(spec, step.stop_set) for step in v0.trace],
        },
        "outer": [
            {
                "k": rec.k,
                "S": _labels(spec, rec.inf_set),
                "D": _labels(spec, rec.sup_set),
                "V": _vec(rec.value),
                "inner": [_labels(spec, step.stop_set) for step in rec.result.trace],
            }
            for rec in sol.trace.outer
        ],
    }


def values_csv(spec, sol):
    """CSV text with columns ``state,psi,phi,V0,...,VN,V``."""
    values = sol.trace.values
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["state", "psi", "phi"] + [f"V{k}" for k in range(len(values))] + ["V"])

    def cell(v):
        return str(v) if isinstance(v, Fraction) else repr(float(v))

    for x, label in enumerate(spec.states.labels):
        row = [label, cell(spec.psi[x]), cell(spec.phi[x])]
        row += [cell(v[x]) for v in values] + [cell(sol.value[x])]
        w.writerow(row)
    return buf.getvalue()


def load_solution(path, spec):
    """Read a solution file back as ``(sup_stop, inf_stop, value)`` index
    sets and vector in the arithmetic of ``spec``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    for f in ("value", "sup_stop", "inf_stop"):
        if f not in data:
            raise SpecFileError(f"missing field {f!r}", f)
    if len(data["value"]) != spec.n:
        raise SpecFileError(f"value must have {spec.n} entries", "value", _line_of(text, "value"))

    def index_set(f):
        try:
            return frozenset(spec.states.index(str(lab)) for lab in data[f])
        except (KeyError, ValueError):
            raise SpecFileError(f"{f} names an unknown state", f, _line_of(text, f)) from None

    value = numeric.as_array([_number(v, spec.exact, "value", text) for v in data["value"]],
                             exact=spec.exact)
    return index_set("sup_stop"), index_set("inf_stop"), value
