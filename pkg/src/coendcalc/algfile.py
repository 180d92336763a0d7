"""Reading and writing the Hopf algebra file format.

One JSON document per algebra: name, dim, basis labels, mult / comult as
nested arrays of scalar strings, unit / counit vectors, the antipode matrix,
and optional r_matrix and pivot.  Scalars serialize as "p/q" with the
denominator omitted when it is 1.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .hopf import HopfAlgebraData, Matrix


def _s(x) -> str:
    return str(x)


def _grid3_to_strings(t):
    return [[[_s(x) for x in row] for row in face] for face in t]


def _grid3_from_strings(t):
    return [[[Fraction(x) for x in row] for row in face] for face in t]


def to_dict(h: HopfAlgebraData) -> dict:
    doc = {
        "name": h.name,
        "dim": h.dim,
        "basis": list(h.basis),
        "mult": _grid3_to_strings(h.mult),
        "unit": [_s(x) for x in h.unit],
        "comult": _grid3_to_strings(h.comult),
        "counit": [_s(x) for x in h.counit],
        "antipode": [[_s(x) for x in row] for row in h.antipode.data],
    }
    if h.r_matrix is not None:
        doc["r_matrix"] = [_s(x) for x in h.r_matrix]
    if h.pivot is not None:
        doc["pivot"] = [_s(x) for x in h.pivot]
    return doc


def from_dict(doc: dict) -> HopfAlgebraData:
    required = ("name", "dim", "basis", "mult", "unit", "comult", "counit", "antipode")
    for key in required:
        if key not in doc:
            raise ValueError("algebra file is missing field %r" % key)
    return HopfAlgebraData(
        name=doc["name"],
        dim=int(doc["dim"]),
        mult=_grid3_from_strings(doc["mult"]),
        unit=[Fraction(x) for x in doc["unit"]],
        comult=_grid3_from_strings(doc["comult"]),
        counit=[Fraction(x) for x in doc["counit"]],
        antipode=Matrix.from_rows([[Fraction(x) for x in row] for row in doc["antipode"]]),
        basis=list(doc["basis"]),
        r_matrix=[Fraction(x) for x in doc["r_matrix"]] if "r_matrix" in doc else None,
        pivot=[Fraction(x) for x in doc["pivot"]] if "pivot" in doc else None,
    )


def dumps(h: HopfAlgebraData) -> str:
    return json.dumps(to_dict(h), indent=1, sort_keys=True) + "\n"


def save(h: HopfAlgebraData, path: str):
    with open(path, "w") as f:
        f.write(dumps(h))


def load(path: str) -> HopfAlgebraData:
    with open(path) as f:
        return from_dict(json.load(f))


def _builtin_filename(name: str) -> str:
    return name.replace("-", "_") + ".json"


def load_builtin(name: str) -> HopfAlgebraData:
    ref = resources.files("coendcalc.data").joinpath(_builtin_filename(name))
    with ref.open() as f:
        return from_dict(json.load(f))
