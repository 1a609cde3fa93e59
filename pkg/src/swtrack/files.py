"""JSON plant/controller/report serialization.

Plant files accept matrix entries as numbers or rational strings ("-72.89"
or "-656/9"); rational strings are preserved exactly for the exact
pipeline.  Controller and report files render every float with 17
significant digits as strings, so identical inputs and seed reproduce
byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from . import __version__
from .design import Controller, EigenPlan, Partitioning
from .simulate import SwitchingSignal, periodic_signal
from .sysmodel import SteadyState, SwitchedPlant

SCHEMA_VERSION = 1
FLOAT_FMT = "%.17g"


class ParseError(ValueError):
    pass


def _num(x):
    """Accept int/float/Fraction or a decimal/rational string."""
    if isinstance(x, bool):
        raise ParseError(f"boolean is not a number: {x!r}")
    if isinstance(x, (int, float, Fraction)):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"bad numeric literal {x!r}") from e
    raise ParseError(f"bad numeric value {x!r}")


def _matrix(raw, name):
    if (not isinstance(raw, list) or not raw
            or any(not isinstance(row, list) for row in raw)):
        raise ParseError(f"{name} must be a non-empty list of rows")
    return [[_num(x) for x in row] for row in raw]


def _vector(raw, name):
    if not isinstance(raw, list):
        raise ParseError(f"{name} must be a list")
    return [float(Fraction(_num(x))) for x in raw]


def fmt_float(x):
    return FLOAT_FMT % float(x)


def _fmt_matrix(M):
    return [[fmt_float(x) for x in row] for row in np.atleast_2d(np.asarray(M))]


def _fmt_vector(v):
    return [fmt_float(x) for x in np.asarray(v).ravel()]


def load_plant_file(path):
    """Parse a plant description: matrices, reference, optional plan/scenario.

    Returns (plant, spec_dict) where spec_dict carries r, x0, plan and
    switching entries in normalized form (or None where absent).
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"cannot read plant file {path}: {e}") from e
    return parse_plant(raw)


def parse_plant(raw):
    for key in ("A1", "B1", "A2", "B2", "C", "r"):
        if key not in raw:
            raise ParseError(f"plant file missing {key!r}")
    A1 = _matrix(raw["A1"], "A1")
    B1 = _matrix(raw["B1"], "B1")
    A2 = _matrix(raw["A2"], "A2")
    B2 = _matrix(raw["B2"], "B2")
    C = _matrix(raw["C"], "C")
    plant = SwitchedPlant.from_matrices(A1, B1, A2, B2, C)
    spec = {
        "r": np.array(_vector(raw["r"], "r")),
        "x0": np.array(_vector(raw["x0"], "x0")) if "x0" in raw else None,
        "plan": _parse_plan(raw.get("plan"), plant.p),
        "switching": _parse_switching(raw.get("switching")),
    }
    if spec["r"].size != plant.p:
        raise ParseError(f"reference length {spec['r'].size} != p={plant.p}")
    if spec["x0"] is not None and spec["x0"].size != plant.n:
        raise ParseError(f"x0 length {spec['x0'].size} != n={plant.n}")
    return plant, spec


def _parse_plan(raw, p):
    if raw is None:
        return None
    plan = {}
    if "partition" in raw:
        plan["partition"] = tuple(int(x) for x in raw["partition"])
    eigs = {}
    for q_str, per_k in raw.get("eigenvalues", {}).items():
        q = int(q_str)
        for k_str, vals in per_k.items():
            eigs[(q, int(k_str))] = tuple(float(Fraction(_num(v))) for v in vals)
    if eigs:
        plan["eigenvalues"] = eigs
    if "pair0" in raw:
        plan["pair0"] = tuple(int(x) for x in raw["pair0"])
    return plan or None


def _parse_switching(raw):
    if raw is None:
        return None
    kind = raw.get("type", "periodic")
    if kind != "periodic":
        raise ParseError(f"unknown switching type {kind!r}")
    return {"type": "periodic",
            "dur1": float(raw["dur1"]), "dur2": float(raw["dur2"]),
            "horizon": float(raw.get("horizon", 3.0))}


def build_signal(switching) -> SwitchingSignal:
    return periodic_signal(switching["dur1"], switching["dur2"],
                           switching["horizon"])


def dump_json(obj, path=None):
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def provenance(seed, tol):
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__,
            "seed": int(seed), "tol": fmt_float(tol)}


def controller_to_json(controller: Controller, seed, tol):
    plant = controller.plant
    plan = controller.plan
    eig_json = {}
    for (q, k), vals in plan.eigenvalues.items():
        eig_json.setdefault(str(q), {})[str(k)] = [fmt_float(v) for v in vals]
    return {
        "schema_version": SCHEMA_VERSION,
        "plant": {
            "A1": _fmt_matrix(plant.sub1.A), "B1": _fmt_matrix(plant.sub1.B),
            "A2": _fmt_matrix(plant.sub2.A), "B2": _fmt_matrix(plant.sub2.B),
            "C": _fmt_matrix(plant.C),
        },
        "reference": _fmt_vector(controller.ss.r),
        "partition": list(plan.partitioning.d),
        "eigenvalues": eig_json,
        "pair0": list(plan.pair0),
        "F1": _fmt_matrix(controller.F1), "F2": _fmt_matrix(controller.F2),
        "G1": _fmt_vector(controller.G1), "G2": _fmt_vector(controller.G2),
        "V": _fmt_matrix(controller.V),
        "columns": [list(c) for c in controller.columns],
        "alpha_scale": _fmt_vector(controller.alpha_scale),
        "x_ss": _fmt_vector(controller.ss.x_ss),
        "u1_ss": _fmt_vector(controller.ss.u1_ss),
        "u2_ss": _fmt_vector(controller.ss.u2_ss),
        "x0_domain": controller.x0_domain,
        "cond_V": fmt_float(controller.cond_V),
        "rect_residual": fmt_float(controller.rect_residual),
        "provenance": provenance(seed, tol),
    }


def controller_from_json(raw) -> Controller:
    try:
        pl = raw["plant"]
        plant = SwitchedPlant.from_matrices(
            _matrix(pl["A1"], "A1"), _matrix(pl["B1"], "B1"),
            _matrix(pl["A2"], "A2"), _matrix(pl["B2"], "B2"),
            _matrix(pl["C"], "C"))
        part = Partitioning(tuple(int(x) for x in raw["partition"]))
        eigs = {}
        for q_str, per_k in raw["eigenvalues"].items():
            for k_str, vals in per_k.items():
                eigs[(int(q_str), int(k_str))] = tuple(float(Fraction(_num(v)))
                                                       for v in vals)
        plan = EigenPlan(part, eigs, tuple(int(x) for x in raw["pair0"]))
        r = np.array(_vector(raw["reference"], "reference"))
        x_ss = np.array(_vector(raw["x_ss"], "x_ss"))
        u1 = np.array(_vector(raw["u1_ss"], "u1_ss"))
        u2 = np.array(_vector(raw["u2_ss"], "u2_ss"))
        ss = SteadyState(x_ss, u1, u2, r, 0.0)
        V = np.array(_matrix(raw["V"], "V"), dtype=float)
        columns = tuple((int(k), int(i)) for k, i in raw["columns"])
        col_eigs = {}
        for q in (1, 2):
            col_eigs[q] = np.array(
                [plan.eigenvalues[(q, k)][i] if k >= 1 else plan.pairs(0)[i][q - 1]
                 for (k, i) in columns])
        return Controller(
            np.array(_matrix(raw["F1"], "F1"), dtype=float),
            np.array(_matrix(raw["F2"], "F2"), dtype=float),
            np.array(_vector(raw["G1"], "G1")),
            np.array(_vector(raw["G2"], "G2")),
            V, columns, col_eigs, plan, ss,
            raw["x0_domain"], float(Fraction(_num(raw["cond_V"]))),
            float(Fraction(_num(raw["rect_residual"]))),
            tuple(_vector(raw["alpha_scale"], "alpha_scale")), plant)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(f"malformed controller file: {e}") from e


def load_controller_file(path) -> Controller:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ParseError(f"cannot read controller file {path}: {e}") from e
    return controller_from_json(raw)
