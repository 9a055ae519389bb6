"""Instance generation and (de)serialization.

Two document kinds, both JSON with self-describing keys:

* instance document:  {"gammas": [reals], "threshold": real}
* scenario document:  {"client": [x, y, z], "wavelength": real,
                       "threshold_beta": real,
                       "agents": [{"mu": [...], "sigma": [[3x3]],
                                   "eta": real (optional)}]}

A scenario carries geometry; its instance is derived through effective_error
with Gamma = threshold_beta * max_expected_gain.  Sweep results additionally
serialize as a JSON array or as CSV with the fixed header

    instance_id,n,gamma_max,beta,algorithm,subset,expected_gain,variance,sr,wall_time_ns

where subset is the ascending comma-joined index string (quoted in CSV, e.g.
"2,3,4") and an unbounded suboptimality ratio is null in JSON / "inf" in CSV.

Random instances follow the experimental protocol: gamma_i ~ U[0, gamma_max]
i.i.d. and Gamma = beta * max_expected_gain, so every generated instance is
feasible.  Per-instance seeds hash (base_seed, cell coordinates, index)
through SeedSequence, making each cell and instance independently
reproducible; float coordinates enter by their IEEE-754 bit patterns.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError, SizeError, ValidationError
from .gain_model import AgentGeometry, Scenario, effective_error, max_expected_gain
from .selection import MAX_ORACLE_AGENTS, Instance
from .submodular import DSConfig

ALGORITHMS = ("greedy", "dlg", "ds", "oracle")

RESULT_FIELDS = (
    "instance_id", "n", "gamma_max", "beta", "algorithm", "subset",
    "expected_gain", "variance", "sr", "wall_time_ns",
)


@dataclass(frozen=True)
class SweepSpec:
    """Grid description for a suboptimality-ratio sweep."""

    n_values: tuple
    gamma_max_values: tuple
    beta_values: tuple
    instances_per_cell: int
    base_seed: int
    algorithms: tuple = ("greedy", "dlg", "ds")
    ds_config: DSConfig = field(default_factory=DSConfig)

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "gamma_max_values",
                           tuple(float(g) for g in self.gamma_max_values))
        object.__setattr__(self, "beta_values",
                           tuple(float(b) for b in self.beta_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not (self.n_values and self.gamma_max_values and self.beta_values):
            raise ValidationError("n_values, gamma_max_values, beta_values must be nonempty")
        for n in self.n_values:
            if n < 1:
                raise ValidationError(f"n must be >= 1, got {n}")
            if n > MAX_ORACLE_AGENTS:
                raise SizeError(f"n = {n} exceeds the oracle cap of {MAX_ORACLE_AGENTS}")
        for g in self.gamma_max_values:
            if not (math.isfinite(g) and g >= 0.0):
                raise ValidationError(f"gamma_max must be finite and >= 0, got {g}")
        for b in self.beta_values:
            if not 0.0 < b <= 1.0:
                raise ValidationError(f"beta must lie in (0, 1], got {b}")
        if self.instances_per_cell < 1:
            raise ValidationError("instances_per_cell must be >= 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValidationError(f"unknown algorithm {a!r}")


@dataclass(frozen=True)
class SweepRecord:
    """One algorithm run on one generated instance."""

    instance_id: str
    n: int
    gamma_max: float
    beta: float
    algorithm: str
    subset: tuple
    expected_gain: float
    variance: float
    sr: float
    wall_time_ns: int


@dataclass(frozen=True)
class ScenarioDocument:
    """A loaded scenario file: the geometry plus its threshold fraction."""

    scenario: Scenario
    threshold_beta: float


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (int, np.integer)) and not isinstance(seed, bool) and seed >= 0:
        return np.random.SeedSequence(int(seed))
    raise InputError(f"seed must be a nonnegative integer or SeedSequence, got {seed!r}")


def _float_bits(x: float) -> int:
    return int(np.float64(x).view(np.uint64))


def instance_seed(base_seed: int, n: int, gamma_max: float, beta: float,
                  index: int) -> np.random.SeedSequence:
    """Derived seed for one sweep instance; unique per (cell, index)."""
    if index < 0:
        raise InputError(f"index must be >= 0, got {index}")
    entropy = (int(base_seed), int(n), _float_bits(gamma_max), _float_bits(beta),
               int(index))
    return np.random.SeedSequence(entropy)


def generate_instance(n: int, gamma_max: float, beta: float, seed) -> Instance:
    """Random instance: gamma_i ~ U[0, gamma_max], Gamma = beta * Gamma_max.

    Feasible by construction for beta <= 1.  Uses the counter-based Philox
    generator so the draw is reproducible across platforms and schedules.
    """
    n = int(n)
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if n > 64:
        raise SizeError(f"n = {n} exceeds the cap of 64")
    gamma_max = float(gamma_max)
    if not (math.isfinite(gamma_max) and gamma_max >= 0.0):
        raise InputError(f"gamma_max must be finite and >= 0, got {gamma_max!r}")
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise InputError(f"beta must lie in (0, 1], got {beta!r}")
    rng = np.random.Generator(np.random.Philox(_as_seed_sequence(seed)))
    gammas = rng.uniform(0.0, gamma_max, size=n)
    return Instance(gammas=gammas, threshold=beta * max_expected_gain(gammas))


def _json_load(path):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid document at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _field(doc: dict, key: str, path) -> object:
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a key/value document at the top level")
    if key not in doc:
        raise ParseError(f"{path}: missing field '{key}'")
    return doc[key]


def load_instance(path) -> Instance:
    """Read an instance document; ParseError names the offending field."""
    doc = _json_load(path)
    gammas = _field(doc, "gammas", path)
    threshold = _field(doc, "threshold", path)
    try:
        return Instance(gammas=gammas, threshold=threshold)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: bad instance fields: {exc}") from exc


def save_instance(path, instance: Instance):
    doc = {"gammas": [float(g) for g in instance.gammas],
           "threshold": float(instance.threshold)}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")


def load_scenario(path) -> ScenarioDocument:
    """Read a scenario document; geometry invariants surface as their own
    error kinds (ModelError, GeometryError, ValidationError, SizeError)."""
    doc = _json_load(path)
    beta = _field(doc, "threshold_beta", path)
    try:
        beta = float(beta)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: threshold_beta must be a number") from exc
    if not 0.0 < beta <= 1.0:
        raise ValidationError(f"{path}: threshold_beta must lie in (0, 1], got {beta}")
    agents_doc = _field(doc, "agents", path)
    if not isinstance(agents_doc, list):
        raise ParseError(f"{path}: 'agents' must be an array")
    agents = []
    for pos, agent_doc in enumerate(agents_doc, 1):
        try:
            agents.append(AgentGeometry(
                mu=_field(agent_doc, "mu", path),
                sigma=_field(agent_doc, "sigma", path),
                eta=float(agent_doc.get("eta", 0.0)),
            ))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: bad agent #{pos}: {exc}") from exc
    scenario = Scenario(
        client=_field(doc, "client", path),
        wavelength=_field(doc, "wavelength", path),
        agents=tuple(agents),
    )
    return ScenarioDocument(scenario=scenario, threshold_beta=beta)


def scenario_to_instance(doc: ScenarioDocument) -> Instance:
    """Reduce a scenario to (gammas, Gamma) via the effective-error formulas."""
    gammas = [effective_error(doc.scenario, i).gamma
              for i in range(1, doc.scenario.n + 1)]
    return Instance(gammas=gammas,
                    threshold=doc.threshold_beta * max_expected_gain(gammas))


def _subset_str(subset) -> str:
    return ",".join(str(i) for i in subset)


def _parse_subset(text: str) -> tuple:
    if text == "":
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad subset field {text!r}") from exc


def _record_to_row(record: SweepRecord) -> dict:
    # native numbers, so QUOTE_NONNUMERIC quotes exactly the string fields;
    # str(float) round-trips at full precision and renders math.inf as "inf"
    return {
        "instance_id": record.instance_id,
        "n": record.n,
        "gamma_max": float(record.gamma_max),
        "beta": float(record.beta),
        "algorithm": record.algorithm,
        "subset": _subset_str(record.subset),
        "expected_gain": float(record.expected_gain),
        "variance": float(record.variance),
        "sr": float(record.sr),
        "wall_time_ns": int(record.wall_time_ns),
    }


def save_result(path, records):
    """Write sweep records as a JSON array (.json) or CSV (anything else).

    JSON renders an unbounded sr as null; CSV as the string "inf".  Full
    double precision either way.
    """
    records = list(records)
    path = Path(path)
    if path.suffix.lower() == ".json":
        docs = []
        for record in records:
            docs.append({
                "instance_id": record.instance_id,
                "n": record.n,
                "gamma_max": float(record.gamma_max),
                "beta": float(record.beta),
                "algorithm": record.algorithm,
                "subset": list(record.subset),
                "expected_gain": float(record.expected_gain),
                "variance": float(record.variance),
                "sr": None if math.isinf(record.sr) else float(record.sr),
                "wall_time_ns": int(record.wall_time_ns),
            })
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(docs, handle, indent=2)
            handle.write("\n")
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(RESULT_FIELDS),
                                quoting=csv.QUOTE_NONNUMERIC)
        writer.writeheader()
        for record in records:
            writer.writerow(_record_to_row(record))


def load_results(path):
    """Read sweep records back from a JSON array or CSV file."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        docs = _json_load(path)
        if not isinstance(docs, list):
            raise ParseError(f"{path}: expected an array of records")
        out = []
        for pos, doc in enumerate(docs, 1):
            try:
                out.append(SweepRecord(
                    instance_id=str(doc["instance_id"]),
                    n=int(doc["n"]),
                    gamma_max=float(doc["gamma_max"]),
                    beta=float(doc["beta"]),
                    algorithm=str(doc["algorithm"]),
                    subset=tuple(int(i) for i in doc["subset"]),
                    expected_gain=float(doc["expected_gain"]),
                    variance=float(doc["variance"]),
                    sr=math.inf if doc["sr"] is None else float(doc["sr"]),
                    wall_time_ns=int(doc["wall_time_ns"]),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}: bad record #{pos}: {exc}") from exc
        return out
    out = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or tuple(reader.fieldnames) != RESULT_FIELDS:
                raise ParseError(
                    f"{path}: expected header {','.join(RESULT_FIELDS)}, "
                    f"got {reader.fieldnames}"
                )
            for line, row in enumerate(reader, 2):
                try:
                    out.append(SweepRecord(
                        instance_id=row["instance_id"],
                        n=int(row["n"]),
                        gamma_max=float(row["gamma_max"]),
                        beta=float(row["beta"]),
                        algorithm=row["algorithm"],
                        subset=_parse_subset(row["subset"]),
                        expected_gain=float(row["expected_gain"]),
                        variance=float(row["variance"]),
                        sr=float(row["sr"]),
                        wall_time_ns=int(row["wall_time_ns"]),
                    ))
                except (KeyError, TypeError, ValueError) as exc:
                    raise ParseError(f"{path}: bad record at line {line}: {exc}") from exc
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return out
