"""JSON set / scenario formats and CSV writers."""
import csv
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .models import build_scenario
from .rcset import RcResult, RcScenario, Variant
from .sets import ConstrainedZonotope, Halfspace, HPolyhedron, SymmetricKind, SymmetricSet

logger = logging.getLogger(__name__)

SET_TYPES = ("czono", "zonotope", "ellipsoid", "l1ball", "hpoly", "halfspace")
APPROXIMATIONS = ("inner", "outer", "two-stage")


# ---------------------------------------------------------------------------
# Field readers
# ---------------------------------------------------------------------------


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and np.isfinite(x)


def _field(obj: dict, key: str, path: str, required: bool = True):
    if key not in obj:
        if required:
            raise SchemaError(f"{path}.{key}", "missing required field")
        return None
    return obj[key]


def _matrix(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise SchemaError(path, "expected a list of rows (nested arrays of numbers)")
    widths = {len(row) for row in value}
    if len(widths) > 1:
        raise SchemaError(path, f"rows have different lengths {sorted(widths)}")
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            if not _is_number(x):
                raise SchemaError(f"{path}[{i}][{j}]", f"expected a finite number, got {x!r}")
    width = widths.pop() if widths else 0
    return np.array(value, dtype=float).reshape(len(value), width)


def _vector(value, path: str) -> np.ndarray:
    if not isinstance(value, list):
        raise SchemaError(path, "expected an array of numbers")
    for i, x in enumerate(value):
        if not _is_number(x):
            raise SchemaError(f"{path}[{i}]", f"expected a finite number, got {x!r}")
    return np.array(value, dtype=float)


def _number(value, path: str) -> float:
    if not _is_number(value):
        raise SchemaError(path, f"expected a finite number, got {value!r}")
    return float(value)


def _integer(value, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise SchemaError(path, f"expected an integer >= {minimum}, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# Sets
# ---------------------------------------------------------------------------


def set_from_json(obj, path: str = "set"):
    """Parse one set document; the result type follows its "type" field."""
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    kind = _field(obj, "type", path)
    if kind not in SET_TYPES:
        raise SchemaError(f"{path}.type", f"expected one of {list(SET_TYPES)}, got {kind!r}")
    try:
        if kind == "czono":
            G = _matrix(_field(obj, "G", path), f"{path}.G")
            c = _vector(_field(obj, "c", path), f"{path}.c")
            A = _field(obj, "A", path, required=False)
            b = _field(obj, "b", path, required=False)
            if (A is None) != (b is None):
                raise SchemaError(path, "fields A and b must be given together")
            if A is None:
                return ConstrainedZonotope(G, c)
            A = _matrix(A, f"{path}.A") if A else np.zeros((0, G.shape[1]))
            return ConstrainedZonotope(G, c, A, _vector(b, f"{path}.b"))
        if kind in ("zonotope", "ellipsoid", "l1ball"):
            G = _matrix(_field(obj, "G", path), f"{path}.G")
            c = _vector(_field(obj, "c", path), f"{path}.c")
            factory = {
                "zonotope": SymmetricSet.zonotope,
                "ellipsoid": SymmetricSet.ellipsoid,
                "l1ball": SymmetricSet.cross_polytope,
            }[kind]
            return factory(G, c)
        if kind == "hpoly":
            return HPolyhedron(
                _matrix(_field(obj, "H", path), f"{path}.H"),
                _vector(_field(obj, "k", path), f"{path}.k"),
            )
        return Halfspace(
            _vector(_field(obj, "p", path), f"{path}.p"),
            _number(_field(obj, "q", path), f"{path}.q"),
        )
    except SchemaError:
        raise
    except ValueError as e:
        raise SchemaError(path, str(e)) from e


_KIND_NAMES = {
    SymmetricKind.ZONOTOPE: "zonotope",
    SymmetricKind.ELLIPSOID: "ellipsoid",
    SymmetricKind.CROSS_POLYTOPE: "l1ball",
}


def set_to_json(S) -> dict:
    if isinstance(S, ConstrainedZonotope):
        doc = {"type": "czono", "G": S.G.tolist(), "c": S.c.tolist(), "A": S.A.tolist(), "b": S.b.tolist()}
        if S.is_empty_marker:
            doc["empty"] = True
        return doc
    if isinstance(S, SymmetricSet):
        if S.kind not in _KIND_NAMES:
            raise ValueError("generic symmetric sets have no JSON form")
        return {"type": _KIND_NAMES[S.kind], "G": S.G.tolist(), "c": S.c.tolist()}
    if isinstance(S, HPolyhedron):
        return {"type": "hpoly", "H": S.H.tolist(), "k": S.k.tolist()}
    if isinstance(S, Halfspace):
        return {"type": "halfspace", "p": S.p.tolist(), "q": S.q}
    raise TypeError(f"cannot serialize {type(S).__name__}")


def as_czono(S, path: str) -> ConstrainedZonotope:
    if isinstance(S, ConstrainedZonotope):
        return S
    if isinstance(S, SymmetricSet) and S.kind is SymmetricKind.ZONOTOPE:
        return S.as_czono()
    raise SchemaError(path, f"expected a czono or zonotope, got {type(S).__name__}")


def as_symmetric(S, path: str) -> SymmetricSet:
    if isinstance(S, SymmetricSet):
        return S
    raise SchemaError(path, "expected a zonotope, ellipsoid or l1ball")


def load_json(path: Path):
    """Read a JSON file; syntax errors carry line and column."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(str(path), e.msg, e.lineno, e.colno) from e


def load_set(path: Path):
    return set_from_json(load_json(path), Path(path).name)


def dump_json(obj, path: Path):
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# RC run configuration
# ---------------------------------------------------------------------------


@dataclass
class RcRunConfig:
    scenario: RcScenario
    approx: str = "inner"
    emit_boundary: bool = False
    directions: int = 100
    seed: int = 0
    area: str = "polygon"
    resolution: int = 200


def _explicit_scenario(doc: dict, horizon: int) -> RcScenario:
    system = _field(doc, "system", "config")
    if not isinstance(system, dict):
        raise SchemaError("config.system", "expected an object")
    variant_name = _field(doc, "variant", "config")
    try:
        variant = Variant(variant_name)
    except ValueError:
        raise SchemaError(
            "config.variant", f"expected one of {[v.value for v in Variant]}, got {variant_name!r}"
        ) from None
    mats = {key: _matrix(_field(system, key, "config.system"), f"config.system.{key}") for key in ("A", "B", "F")}
    sets = {key: set_from_json(_field(system, key, "config.system"), f"config.system.{key}") for key in "UWXG"}
    X = sets["X"]
    if variant is Variant.POLYTOPIC_X:
        X = as_czono(X, "config.system.X")
    elif not isinstance(X, HPolyhedron):
        raise SchemaError("config.system.X", "variant invertible-a needs an hpoly")
    return RcScenario.time_invariant(
        mats["A"], mats["B"], mats["F"],
        as_czono(sets["U"], "config.system.U"),
        as_symmetric(sets["W"], "config.system.W"),
        X,
        as_czono(sets["G"], "config.system.G"),
        horizon,
        variant,
        "explicit",
    )


def rc_config_from_json(doc, seed: int | None = None, directions: int | None = None) -> RcRunConfig:
    if not isinstance(doc, dict):
        raise SchemaError("config", "expected an object")
    model = _field(doc, "model", "config")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError("config.params", "expected an object")
    params = dict(params)
    run_seed = seed if seed is not None else _integer(doc.get("seed", 0), "config.seed")
    T = doc.get("T")
    if T is not None:
        T = _integer(T, "config.T")

    if model == "explicit":
        if T is None:
            raise SchemaError("config.T", "explicit models need a horizon")
        scenario = _explicit_scenario(doc, T)
    else:
        if T is not None:
            params["horizon"] = T
        if model == "random":
            params.setdefault("seed", run_seed)
        try:
            scenario = build_scenario(model, **params)
        except TypeError as e:
            raise SchemaError("config.params", str(e)) from e
        except ValueError as e:
            raise SchemaError("config.model", str(e)) from e
    if "W" in doc:
        scenario = scenario.with_disturbance(as_symmetric(set_from_json(doc["W"], "config.W"), "config.W"))

    approx = doc.get("approx", "inner")
    if approx not in APPROXIMATIONS:
        raise SchemaError("config.approx", f"expected one of {list(APPROXIMATIONS)}, got {approx!r}")
    area = doc.get("area", "polygon")
    if area not in ("polygon", "grid"):
        raise SchemaError("config.area", f"expected 'polygon' or 'grid', got {area!r}")
    emit = doc.get("emit_boundary", False)
    if not isinstance(emit, bool):
        raise SchemaError("config.emit_boundary", f"expected a boolean, got {emit!r}")
    return RcRunConfig(
        scenario=scenario,
        approx=approx,
        emit_boundary=emit,
        directions=directions if directions is not None else _integer(doc.get("directions", 100), "config.directions", 3),
        seed=run_seed,
        area=area,
        resolution=_integer(doc.get("resolution", 200), "config.resolution", 1),
    )


def load_rc_config(path: Path, seed: int | None = None, directions: int | None = None) -> RcRunConfig:
    return rc_config_from_json(load_json(path), seed, directions)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def format_number(x) -> str:
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else format_number(v) for v in row])


def write_summary_csv(result: RcResult, path: Path) -> None:
    rows = []
    for t, (K, cx) in enumerate(zip(result.sets, result.complexities)):
        rows.append([t, cx.constraints, K.n_generators, cx.dof_order, result.empty[t]])
    write_csv(path, ["t", "M", "N", "dof", "empty"], rows)


def write_timings_csv(result: RcResult, path: Path) -> None:
    write_csv(path, ["t", "millis"], [[t, 1e3 * s] for t, s in enumerate(result.step_seconds)])


def write_polygon_csv(points, path: Path) -> None:
    write_csv(path, ["x", "y"], np.asarray(points, dtype=float).reshape(-1, 2).tolist())
