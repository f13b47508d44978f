"""Parameter learning: from a causal structure and data to a CBN.

Each variable gets a conditional probability table estimated by maximum
likelihood over observational records (Laplace-smoothed), with rows whose
parent configuration was never observed optionally re-estimated from
targeted interventions when every parent is doable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError, EnvironmentFailure, StructuralError
from .model import CausalDiagram, Intervention, Scm, VariableId, check_acyclic
from .rng import derive_seed
from .simulator import Dataset, EnvironmentHandle


@dataclass(frozen=True)
class Provenance:
    """How one CPT row was obtained."""

    kind: str  # "estimated" | "smoothed" | "intervention"
    count: int = 0

    ESTIMATED = "estimated"
    SMOOTHED = "smoothed"
    INTERVENTION = "intervention"


@dataclass(frozen=True)
class Cpt:
    """Probabilities of ``owner`` being true per parent assignment.

    Bit j of a row index is the value of ``parents[j]``; parents are in
    ascending variable-index order.
    """

    owner: VariableId
    parents: tuple[VariableId, ...]
    rows: tuple[float, ...]
    provenance: tuple[Provenance, ...]

    def row_index(self, assignment: Mapping[VariableId, bool]) -> int:
        idx = 0
        for j, p in enumerate(self.parents):
            idx |= int(bool(assignment[p])) << j
        return idx


@dataclass(frozen=True)
class CausalBayesianNetwork:
    """A learned causal diagram plus one CPT per variable."""

    structure: CausalDiagram
    cpts: Mapping[VariableId, Cpt]

    def to_scm(self) -> Scm:
        return Scm(self.structure, {v: c.rows for v, c in self.cpts.items()})


def fit_mle(
    structure: CausalDiagram,
    dataset: Dataset,
    pseudo_count: float = 1.0,
) -> CausalBayesianNetwork:
    """Maximum-likelihood CPTs from the observational records.

    Row value: (N1 + pseudo_count) / (N0 + N1 + 2 * pseudo_count), where
    Nv counts observational records with the owner equal to v under the
    row's parent assignment.  Never-observed rows become 0.5, marked
    smoothed.  Interventional records are ignored: mutilation biases the
    conditional frequencies they would contribute.
    """
    if pseudo_count < 0:
        raise ConfigError("pseudo_count must be non-negative")
    missing = set(structure.variable_ids) - set(dataset.variables)
    if missing:
        raise StructuralError(f"dataset lacks variables: {sorted(missing)}")
    obs = dataset.observational()
    cpts = {}
    for v in structure.variable_ids:
        parents = structure.parents_of(v)
        owner_col = obs.column(v).astype(np.int64)
        row_of_record = np.zeros(len(obs), dtype=np.int64)
        for j, p in enumerate(parents):
            row_of_record |= obs.column(p).astype(np.int64) << j
        n_rows = 1 << len(parents)
        n1 = np.bincount(row_of_record, weights=owner_col, minlength=n_rows)
        n_tot = np.bincount(row_of_record, minlength=n_rows)
        rows = []
        provenance = []
        for r in range(n_rows):
            total = int(n_tot[r])
            if total == 0:
                rows.append(0.5)
                provenance.append(Provenance(Provenance.SMOOTHED))
                continue
            ones = float(n1[r])
            rows.append((ones + pseudo_count) / (total + 2.0 * pseudo_count))
            provenance.append(Provenance(Provenance.ESTIMATED, total))
        cpts[v] = Cpt(v, parents, tuple(rows), tuple(provenance))
    return CausalBayesianNetwork(structure, cpts)


def augment_with_interventions(
    cbn: CausalBayesianNetwork,
    env: EnvironmentHandle,
    min_count: int = 5,
    samples: int = 20,
    seed: int = 0,
) -> CausalBayesianNetwork:
    """Re-estimate under-observed CPT rows from targeted interventions.

    A row qualifies when its observation count is below ``min_count`` and
    every parent is doable: the parents are then forced to the row's
    assignment and the owner's frequency over ``samples`` fresh records
    replaces the estimate.  Rows with a non-doable parent are left as
    they are.  The update is atomic: all rows are re-estimated before any
    replacement network is built.
    """
    if min_count < 1:
        raise ConfigError("min_count must be at least 1")
    if samples < 1:
        raise ConfigError("samples must be at least 1")
    doable = {v.id: v.doable for v in env.variables}
    new_cpts: dict[VariableId, Cpt] = {}
    for v in cbn.structure.variable_ids:
        cpt = cbn.cpts[v]
        rows = list(cpt.rows)
        provenance = list(cpt.provenance)
        for r in range(len(rows)):
            if provenance[r].count >= min_count:
                continue
            if not all(doable.get(p, False) for p in cpt.parents):
                continue
            assignment = {p: bool((r >> j) & 1) for j, p in enumerate(cpt.parents)}
            draw_seed = derive_seed(seed, "augment", v.index, r)
            try:
                data = env.intervene(Intervention(assignment), samples, draw_seed)
            except Exception as exc:
                raise EnvironmentFailure(
                    f"intervention sampling failed for {v} row {r}: {exc}"
                ) from exc
            if len(data) != samples:
                raise EnvironmentFailure(
                    f"environment returned {len(data)} of {samples} records"
                )
            ones = int(np.sum(data.column(v)))
            rows[r] = ones / samples
            provenance[r] = Provenance(Provenance.INTERVENTION, samples)
        new_cpts[v] = Cpt(v, cpt.parents, tuple(rows), tuple(provenance))
    return CausalBayesianNetwork(cbn.structure, new_cpts)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    smoothed_rows: tuple[tuple[VariableId, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_cbn(cbn: CausalBayesianNetwork) -> ValidationReport:
    """Check structural invariants and report smoothed (never-observed) rows."""
    violations: list[str] = []
    smoothed: list[tuple[VariableId, int]] = []
    ok, cycle = check_acyclic(cbn.structure)
    if not ok:
        violations.append(f"structure has cycle {cycle}")
    for v in cbn.structure.variable_ids:
        cpt = cbn.cpts.get(v)
        if cpt is None:
            violations.append(f"missing cpt for {v}")
            continue
        expected = 1 << len(cbn.structure.parents_of(v))
        if len(cpt.rows) != expected:
            violations.append(
                f"cpt for {v} has {len(cpt.rows)} rows, expected {expected}"
            )
        if len(cpt.provenance) != len(cpt.rows):
            violations.append(f"cpt for {v} lacks one provenance entry per row")
        if cpt.parents != cbn.structure.parents_of(v):
            violations.append(f"cpt parents for {v} disagree with structure")
        for r, p in enumerate(cpt.rows):
            if not (0.0 <= p <= 1.0):
                violations.append(f"cpt row {r} of {v} outside [0, 1]: {p}")
        for r, prov in enumerate(cpt.provenance):
            if prov.kind == Provenance.SMOOTHED:
                smoothed.append((v, r))
    return ValidationReport(tuple(violations), tuple(smoothed))
