"""Simulated smart-home environments.

A scenario describes a household of Boolean variables (person present,
presence sensor, light, power draw, heater, window, outdoor warmth,
thermometer), their causal mechanisms, and which of them accept
interventions.  Sampling is ancestral over the SCM; interventions sample
the mutilated SCM, which directly yields the post-intervention
equilibrium since mechanisms are memoryless.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Protocol, runtime_checkable

import numpy as np

from . import _kernels
from .errors import ConfigError, StructuralError
from .model import (
    CausalDiagram,
    Intervention,
    Scm,
    Variable,
    VariableId,
    WorldState,
    mutilate,
    topological_order,
)


@dataclass(frozen=True)
class Regime:
    """Generating condition of a record: observational or a do-assignment."""

    intervention: Intervention | None = None

    @property
    def is_observational(self) -> bool:
        return self.intervention is None

    def label(self) -> str:
        if self.intervention is None:
            return "obs"
        return str(self.intervention)


OBSERVATIONAL = Regime(None)


class Dataset:
    """Boolean records over a fixed variable set, each tagged with its regime.

    Values are stored as a (n, m) uint8 array whose columns follow the
    ascending variable-index order of ``variables``.
    """

    def __init__(
        self,
        variables: Iterable[VariableId],
        values: np.ndarray,
        regimes: Iterable[Regime],
    ):
        self.variables = tuple(sorted(variables, key=lambda v: v.index))
        self.values = np.asarray(values, dtype=np.uint8)
        self.regimes = tuple(regimes)
        if self.values.ndim != 2 or self.values.shape[1] != len(self.variables):
            raise StructuralError("dataset values shape does not match variables")
        if len(self.regimes) != self.values.shape[0]:
            raise StructuralError("one regime tag required per record")
        self._col = {v: i for i, v in enumerate(self.variables)}

    def __len__(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dataset)
            and self.variables == other.variables
            and self.regimes == other.regimes
            and np.array_equal(self.values, other.values)
        )

    def column_index(self, vid: VariableId) -> int:
        if vid not in self._col:
            raise StructuralError(f"variable not in dataset: {vid}")
        return self._col[vid]

    def column(self, vid: VariableId) -> np.ndarray:
        return self.values[:, self.column_index(vid)]

    def record(self, i: int) -> tuple[Regime, WorldState]:
        row = self.values[i]
        return self.regimes[i], WorldState(
            {v: bool(row[j]) for j, v in enumerate(self.variables)}
        )

    def subset(self, mask: np.ndarray) -> "Dataset":
        idx = np.flatnonzero(mask)
        return Dataset(
            self.variables,
            self.values[idx],
            tuple(self.regimes[i] for i in idx),
        )

    def observational(self) -> "Dataset":
        mask = np.fromiter(
            (r.is_observational for r in self.regimes), dtype=bool, count=len(self)
        )
        return self.subset(mask)

    @staticmethod
    def concatenate(parts: Iterable["Dataset"]) -> "Dataset":
        parts = list(parts)
        if not parts:
            raise StructuralError("cannot concatenate zero datasets")
        vars0 = parts[0].variables
        if any(p.variables != vars0 for p in parts):
            raise StructuralError("datasets have mismatched variables")
        values = np.concatenate([p.values for p in parts], axis=0)
        regimes: tuple[Regime, ...] = sum((p.regimes for p in parts), ())
        return Dataset(vars0, values, regimes)


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of a household.

    ``variables`` may be empty, in which case the built-in default
    household is generated, honouring ``proximity_edge`` (light placed
    next to the thermometer) and ``effect_strengths`` overrides.
    ``nd_set`` marks the listed variables non-doable in either case.
    """

    variables: tuple[tuple[str, bool], ...] = ()
    parents: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    cpts: Mapping[str, tuple[float, ...]] = field(default_factory=dict)
    nd_set: frozenset[str] = frozenset()
    proximity_edge: bool = False
    effect_strengths: Mapping[str, float] = field(default_factory=dict)


VARIABLE_NAMES = ("P", "Pr", "L", "Pow", "H", "W", "O", "T")

# Noisy-OR effect weights and base rates of the default household.  The
# values are tuned so that each strong effect is reliably detectable by a
# 20-samples-per-arm chi-squared test while weak effects stay invisible.
DEFAULT_EFFECTS: dict[str, float] = {
    "person_prior": 0.40,
    "heater_prior": 0.30,
    "window_prior": 0.30,
    "outdoor_prior": 0.30,
    "sensor_rates": (0.08, 0.78),  # P(Pr=1 | P=0), P(Pr=1 | P=1)
    "light_rates": (0.10, 0.72),  # P(L=1 | Pr=0), P(L=1 | Pr=1)
    "power_base": 0.03,
    "light_power_effect": 0.95,
    "heater_power_effect": 0.95,
    "heat_base": 0.04,
    "heater_heat_effect": 0.93,
    "window_heat_effect": 0.93,
    "outdoor_heat_effect": 0.93,
    "light_heat_effect": 0.0,
}

# With the light near the thermometer its heat dominates; the other
# inputs are weakened so the new cause stands out against saturation.
PROXIMITY_EFFECTS: dict[str, float] = {
    "light_heat_effect": 0.93,
    "heater_heat_effect": 0.55,
    "window_heat_effect": 0.45,
    "outdoor_heat_effect": 0.40,
    "heat_base": 0.04,
}


def noisy_or_rows(base: float, weights: tuple[float, ...]) -> tuple[float, ...]:
    """CPT rows of a noisy-OR mechanism: each active parent independently
    fails to trigger the effect with probability 1 - weight."""
    k = len(weights)
    rows = []
    for row in range(1 << k):
        q = 1.0 - base
        for j, w in enumerate(weights):
            if (row >> j) & 1:
                q *= 1.0 - w
        rows.append(1.0 - q)
    return tuple(rows)


def default_scenario(
    nd_set: Iterable[str] = (),
    proximity_edge: bool = False,
    effect_strengths: Mapping[str, float] | None = None,
) -> ScenarioConfig:
    """The stock eight-variable household, fully written out.

    Ground-truth arrows: P->Pr, Pr->L, L->Pow, H->Pow, O->T, H->T, W->T,
    plus L->T when ``proximity_edge`` is set.
    """
    eff = dict(DEFAULT_EFFECTS)
    if proximity_edge:
        eff.update(PROXIMITY_EFFECTS)
    if effect_strengths:
        unknown = set(effect_strengths) - set(eff)
        if unknown:
            raise ConfigError(f"unknown effect strengths: {sorted(unknown)}")
        eff.update(effect_strengths)

    s0, s1 = eff["sensor_rates"]
    l0, l1 = eff["light_rates"]
    parents: dict[str, tuple[str, ...]] = {
        "Pr": ("P",),
        "L": ("Pr",),
        "Pow": ("L", "H"),
        "T": ("H", "W", "O"),
    }
    cpts: dict[str, tuple[float, ...]] = {
        "P": (eff["person_prior"],),
        "Pr": (s0, s1),
        "L": (l0, l1),
        "Pow": noisy_or_rows(
            eff["power_base"],
            (eff["light_power_effect"], eff["heater_power_effect"]),
        ),
        "H": (eff["heater_prior"],),
        "W": (eff["window_prior"],),
        "O": (eff["outdoor_prior"],),
        "T": noisy_or_rows(
            eff["heat_base"],
            (
                eff["heater_heat_effect"],
                eff["window_heat_effect"],
                eff["outdoor_heat_effect"],
            ),
        ),
    }
    if proximity_edge:
        parents["T"] = ("L", "H", "W", "O")
        cpts["T"] = noisy_or_rows(
            eff["heat_base"],
            (
                eff["light_heat_effect"],
                eff["heater_heat_effect"],
                eff["window_heat_effect"],
                eff["outdoor_heat_effect"],
            ),
        )
    return ScenarioConfig(
        variables=tuple((name, True) for name in VARIABLE_NAMES),
        parents=parents,
        cpts=cpts,
        nd_set=frozenset(nd_set),
        proximity_edge=proximity_edge,
        effect_strengths=dict(effect_strengths or {}),
    )


def four_rooms(
    nd_set: Iterable[str] = (),
    effect_strengths: Mapping[str, float] | None = None,
) -> dict[str, ScenarioConfig]:
    """Four independent room instances; the bathroom light sits close
    enough to the thermometer to heat it."""
    rooms = {}
    for room in ("living_room", "kitchen", "bedroom", "bathroom"):
        rooms[room] = default_scenario(
            nd_set=nd_set,
            proximity_edge=(room == "bathroom"),
            effect_strengths=effect_strengths,
        )
    return rooms


def build_scenario(config: ScenarioConfig) -> Scm:
    """Materialise a config into a ground-truth SCM with doable flags."""
    if not config.variables:
        config = default_scenario(
            nd_set=config.nd_set,
            proximity_edge=config.proximity_edge,
            effect_strengths=config.effect_strengths,
        )
    names = [name for name, _ in config.variables]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate variable declaration")
    unknown_nd = set(config.nd_set) - set(names)
    if unknown_nd:
        raise ConfigError(f"nd_set references unknown variables: {sorted(unknown_nd)}")
    ids = {name: VariableId(i, name) for i, name in enumerate(names)}
    variables = tuple(
        Variable(ids[name], doable and name not in config.nd_set)
        for name, doable in config.variables
    )
    arrows = set()
    for child, parent_names in config.parents.items():
        if child not in ids:
            raise ConfigError(f"parents declared for unknown variable: {child}")
        for p in parent_names:
            if p not in ids:
                raise ConfigError(f"unknown parent {p} of {child}")
            arrows.add((ids[p], ids[child]))
    diagram = CausalDiagram(variables, arrows)
    mechanisms = {}
    for name in names:
        if name not in config.cpts:
            raise ConfigError(f"missing cpt rows for {name}")
        rows = config.cpts[name]
        expected = 1 << len(diagram.parents_of(ids[name]))
        if len(rows) != expected:
            raise ConfigError(
                f"cpt for {name} has {len(rows)} rows, expected {expected}"
            )
        mechanisms[ids[name]] = rows
    try:
        return Scm(diagram, mechanisms)
    except StructuralError as exc:
        raise ConfigError(str(exc)) from exc


def _pack(scm: Scm):
    """Flatten an SCM into the arrays the sampling kernels consume."""
    ids = scm.diagram.variable_ids
    col = {v: i for i, v in enumerate(ids)}
    parent_cols: list[int] = []
    parent_offsets = [0]
    cpt_values: list[float] = []
    cpt_offsets = [0]
    for v in ids:
        parent_cols.extend(col[p] for p in scm.diagram.parents_of(v))
        parent_offsets.append(len(parent_cols))
        cpt_values.extend(scm.mechanisms[v])
        cpt_offsets.append(len(cpt_values))
    topo = np.array([col[v] for v in topological_order(scm.diagram)], dtype=np.int64)
    return (
        np.array(parent_cols, dtype=np.int64),
        np.array(parent_offsets, dtype=np.int64),
        np.array(cpt_values, dtype=np.float64),
        np.array(cpt_offsets, dtype=np.int64),
        topo,
    )


def _sample_values(scm: Scm, n: int, seed: int) -> np.ndarray:
    parent_cols, parent_offsets, cpt_values, cpt_offsets, topo = _pack(scm)
    return _kernels.sample_records(
        seed, n, len(scm.diagram.variable_ids),
        parent_cols, parent_offsets, cpt_values, cpt_offsets, topo,
    )


def sample_state(scm: Scm, seed: int) -> WorldState:
    """One equilibrium state of the house, ancestrally sampled."""
    values = _sample_values(scm, 1, seed)[0]
    return WorldState(
        {v: bool(values[i]) for i, v in enumerate(scm.diagram.variable_ids)}
    )


def sample_dataset(scm: Scm, n: int, seed: int) -> Dataset:
    """``n`` observational records; deterministic in (scm, n, seed)."""
    if n < 0:
        raise ConfigError("record count must be non-negative")
    values = _sample_values(scm, n, seed)
    return Dataset(scm.diagram.variable_ids, values, (OBSERVATIONAL,) * n)


def sample_under_do(
    scm: Scm, intervention: Intervention, n: int, seed: int
) -> Dataset:
    """``n`` records from the mutilated SCM, tagged with the do-regime."""
    if n < 0:
        raise ConfigError("record count must be non-negative")
    cut = mutilate(scm, intervention)
    values = _sample_values(cut, n, seed)
    return Dataset(
        scm.diagram.variable_ids, values, (Regime(intervention),) * n
    )


@runtime_checkable
class EnvironmentHandle(Protocol):
    """Anything that can be observed and intervened on."""

    @property
    def variables(self) -> tuple[Variable, ...]: ...

    def observe(self, n: int, seed: int) -> Dataset: ...

    def intervene(self, intervention: Intervention, n: int, seed: int) -> Dataset: ...


class SimulatedHome:
    """EnvironmentHandle backed by a ground-truth SCM.

    The simulator itself accepts interventions on any variable (doable
    policy is the caller's job), mirroring a test bench where physically
    infeasible interventions remain possible.
    """

    def __init__(self, scm: Scm):
        self.scm = scm

    @property
    def variables(self) -> tuple[Variable, ...]:
        return self.scm.diagram.variables

    def observe(self, n: int, seed: int) -> Dataset:
        return sample_dataset(self.scm, n, seed)

    def intervene(self, intervention: Intervention, n: int, seed: int) -> Dataset:
        return sample_under_do(self.scm, intervention, n, seed)
