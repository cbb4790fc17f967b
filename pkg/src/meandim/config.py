"""JSON configuration loaders for systems, potentials, measures, marker functions and scenarios.

Every config is a JSON object with ``"schema": 1`` and a ``"kind"``.  Arguments
that name a config may be a path, an inline JSON object, or an already-parsed dict.
Rational strings such as ``"1/3"`` are accepted wherever a number is expected.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .measures import ProbMeasure, product_measure, quantized_top_uniform
from .spaces import DEFAULT_POINT_BUDGET, DEFAULT_WINDOW, FiniteSystem, Potential, SymbolicModel, build_symbolic
from .tiling import MarkerFunction

SCHEMA_VERSION = 1


def load_json(source, base: Path | None = None) -> dict:
    if isinstance(source, dict):
        data = source
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        data = json.loads(source)
    else:
        path = Path(source)
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    version = data.get("schema", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r}")
    return data


def _num(v, exact: bool = False):
    if isinstance(v, str):
        try:
            q = Fraction(v)
        except ValueError as exc:
            raise ConfigError(f"not a number: {v!r}") from exc
        return q if exact else float(q)
    if isinstance(v, (int, float)):
        return Fraction(v) if exact and isinstance(v, int) else v
    raise ConfigError(f"not a number: {v!r}")


def _kind(data: dict, allowed) -> str:
    kind = data.get("kind")
    if kind not in allowed:
        raise ConfigError(f"kind must be one of {sorted(allowed)}, got {kind!r}")
    return kind


def symbolic_model(data: dict) -> SymbolicModel:
    if "alphabet" in data:
        alphabet = [_num(a) for a in data["alphabet"]]
    elif "levels" in data:
        m = int(data["levels"])
        alphabet = [j / (m - 1) for j in range(m)] if m > 1 else [0.0]
    else:
        raise ConfigError("symbolic system needs 'alphabet' or 'levels'")
    return SymbolicModel(tuple(alphabet), int(data.get("period", 1)),
                         int(data.get("window", DEFAULT_WINDOW)))


def load_system(source, budget: int = DEFAULT_POINT_BUDGET, base: Path | None = None) -> FiniteSystem:
    data = load_json(source, base)
    kind = _kind(data, {"symbolic", "explicit", "cycle"})
    if kind == "symbolic":
        return build_symbolic(symbolic_model(data), budget)
    if kind == "cycle":
        return FiniteSystem.cycle(int(data["p"]), data.get("label"))
    points = [str(p) for p in data["points"]]
    index = {p: i for i, p in enumerate(points)}
    tmap = data["time_map"]
    if isinstance(tmap, dict):
        tmap = [index[str(tmap[p])] for p in points]
    else:
        tmap = [index[str(t)] if str(t) in index and not isinstance(t, int) else int(t) for t in tmap]
    dist = np.array([[_num(v) for v in row] for row in data["dist"]], dtype=np.float64)
    if len(points) > budget:
        raise ConfigError(f"{len(points)} points exceeds budget {budget}")
    return FiniteSystem(tuple(points), dist, np.array(tmap), data.get("label", "explicit"))


def _table(sys: FiniteSystem, values, exact: bool = False) -> list:
    if isinstance(values, dict):
        out = [Fraction(0) if exact else 0.0] * sys.n
        for k, v in values.items():
            try:
                out[sys.index(str(k))] = _num(v, exact)
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"unknown point id {k!r}") from exc
        return out
    if len(values) != sys.n:
        raise ConfigError(f"table has {len(values)} entries for {sys.n} points")
    return [_num(v, exact) for v in values]


def load_potential(source, sys: FiniteSystem, base: Path | None = None) -> Potential:
    if source is None:
        return Potential.constant(sys.n, 0.0)
    if isinstance(source, str) and source.startswith("x") and source[1:].isdigit():
        return Potential.coordinate(sys, int(source[1:]))
    data = load_json(source, base)
    kind = _kind(data, {"coordinate", "constant", "table"})
    if kind == "coordinate":
        return Potential.coordinate(sys, int(data.get("index", 0)))
    if kind == "constant":
        return Potential.constant(sys.n, _num(data.get("value", 0.0)))
    return Potential(np.array(_table(sys, data["values"]), dtype=np.float64), "table")


def load_measure(source, sys: FiniteSystem, base: Path | None = None) -> ProbMeasure:
    data = load_json(source, base)
    kind = _kind(data, {"uniform", "point_mass", "table", "product", "hilbert_nu"})
    if kind == "uniform":
        return ProbMeasure.uniform(sys.n)
    if kind == "point_mass":
        try:
            return ProbMeasure.point_mass(sys.n, sys.index(str(data["point"])))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"unknown point id {data.get('point')!r}") from exc
    if kind == "table":
        return ProbMeasure(np.array(_table(sys, data["weights"]), dtype=np.float64))
    model = _model_of(sys, data)
    if kind == "product":
        return product_measure(model, [_num(w) for w in data["symbol_weights"]])
    return product_measure(model, quantized_top_uniform(model.alphabet_values, _num(data["k"])))


def _model_of(sys: FiniteSystem, data: dict) -> SymbolicModel:
    """Recover the alphabet (in build order) from the ids and coordinates of a symbolic system."""
    if sys.coords is None:
        raise ConfigError("product measures need a symbolic system")
    levels = {}
    for pid, row in zip(sys.points, sys.coords):
        for j, v in zip(str(pid).split(","), row):
            levels[int(j)] = float(v)
    return SymbolicModel(tuple(levels[j] for j in range(len(levels))), sys.coords.shape[1])


def symbol_weights(source, model: SymbolicModel, base: Path | None = None):
    """Per-symbol weights of a product or hilbert_nu measure config, else None."""
    data = load_json(source, base)
    if data.get("kind") == "product":
        return np.array([_num(w) for w in data["symbol_weights"]], dtype=np.float64)
    if data.get("kind") == "hilbert_nu":
        return quantized_top_uniform(model.alphabet_values, _num(data["k"]))
    return None


def load_psi(source, sys: FiniteSystem, base: Path | None = None) -> MarkerFunction:
    data = load_json(source, base)
    kind = _kind(data, {"constant", "cylinder", "table", "points"})
    if kind == "constant":
        return MarkerFunction.constant(sys, _num(data.get("value", 1), exact=True))
    if kind == "cylinder":
        return MarkerFunction.cylinder(sys, data["prefix"])
    if kind == "points":
        idx = [sys.index(str(p)) for p in data["points"]]
        return MarkerFunction.on_points(sys, idx, _num(data.get("value", 1), exact=True))
    return MarkerFunction(tuple(_table(sys, data["values"], exact=True))).validate(sys)


@dataclass(frozen=True)
class Scenario:
    system: dict
    potential: object = None
    measures: tuple = ()
    eps: tuple = (0.5, 0.25)
    N_max: int = 2
    modules: tuple = ("cover", "hausdorff", "widim", "rd")
    outputs: dict = field(default_factory=dict)
    seed: int = 0
    label: str = ""


def load_scenario(source) -> Scenario:
    base = Path(source).parent if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{") else None
    data = load_json(source)
    if "system" not in data:
        raise ConfigError("scenario needs a 'system'")
    system = load_json(data["system"], base)
    pot = data.get("potential")
    if pot is not None and not (isinstance(pot, str) and pot.startswith("x")):
        pot = load_json(pot, base)
    measures = tuple(load_json(m, base) for m in data.get("measures", [{"kind": "uniform"}]))
    eps = tuple(float(_num(e)) for e in data.get("eps", (0.5, 0.25)))
    if not eps:
        raise ConfigError("eps grid must be nonempty")
    N_max = int(data.get("N_max", 2))
    if N_max < 1:
        raise ConfigError("N_max must be >= 1")
    modules = tuple(data.get("modules", Scenario.modules))
    unknown = set(modules) - {"cover", "hausdorff", "widim", "rd"}
    if unknown:
        raise ConfigError(f"unknown modules {sorted(unknown)}")
    return Scenario(system, pot, measures, eps, N_max, modules, dict(data.get("outputs", {})),
                    int(data.get("seed", 0)), str(data.get("label", "")))
