"""Core causal-model representations.

Variables are Boolean.  A mechanism for a variable with parents
``(p1, .., pk)`` (always ordered by ascending variable index) is a tuple
of ``2**k`` probabilities of the variable being true, one per parent
assignment.  Row indexing: bit ``j`` of the row index is the value of
parent ``j``, so the first parent is the least significant bit.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import StructuralError

Arrow = tuple["VariableId", "VariableId"]


@dataclass(frozen=True, order=True)
class VariableId:
    """Identity of a model variable: a small index plus a short name."""

    index: int
    name: str

    def __post_init__(self):
        if self.index < 0:
            raise StructuralError(f"variable index must be non-negative: {self.index}")
        if not self.name:
            raise StructuralError("variable name must be nonempty")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable:
    """A variable together with its intervention policy flag."""

    id: VariableId
    doable: bool = True


@dataclass(frozen=True)
class CausalDiagram:
    """A directed graph over declared variables.

    Construction checks that arrows reference declared variables and that
    there are no self-loops.  Acyclicity is *not* enforced here; use
    :func:`check_acyclic`.
    """

    variables: tuple[Variable, ...]
    arrows: frozenset[Arrow]

    def __init__(self, variables: Iterable[Variable], arrows: Iterable[Arrow] = ()):
        variables = tuple(sorted(variables, key=lambda v: v.id.index))
        arrows = frozenset(arrows)
        ids = [v.id for v in variables]
        if len({i.index for i in ids}) != len(ids):
            raise StructuralError("variable indices must be unique")
        if len({i.name for i in ids}) != len(ids):
            raise StructuralError("variable names must be unique")
        declared = set(ids)
        for cause, effect in arrows:
            if cause not in declared or effect not in declared:
                raise StructuralError(f"dangling arrow endpoint: {cause} -> {effect}")
            if cause == effect:
                raise StructuralError(f"self-loop on {cause}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "arrows", arrows)

    @property
    def variable_ids(self) -> tuple[VariableId, ...]:
        return tuple(v.id for v in self.variables)

    def variable(self, name: str) -> VariableId:
        for v in self.variables:
            if v.id.name == name:
                return v.id
        raise StructuralError(f"unknown variable: {name}")

    def is_doable(self, vid: VariableId) -> bool:
        for v in self.variables:
            if v.id == vid:
                return v.doable
        raise StructuralError(f"unknown variable: {vid}")

    def parents_of(self, vid: VariableId) -> tuple[VariableId, ...]:
        return tuple(sorted((c for c, e in self.arrows if e == vid)))

    def children_of(self, vid: VariableId) -> tuple[VariableId, ...]:
        return tuple(sorted((e for c, e in self.arrows if c == vid)))

    def with_arrows(self, arrows: Iterable[Arrow]) -> "CausalDiagram":
        return CausalDiagram(self.variables, arrows)


def check_acyclic(diagram: CausalDiagram) -> tuple[bool, list[VariableId] | None]:
    """Return ``(True, None)`` if the diagram has no directed cycle,
    else ``(False, witness)`` where witness is one cycle as a closed
    vertex path, e.g. ``[A, B, A]``."""
    ids = diagram.variable_ids
    succ = {v: diagram.children_of(v) for v in ids}
    WHITE, GREY, BLACK = 0, 1, 2
    color = {v: WHITE for v in ids}
    stack_path: list[VariableId] = []

    def visit(v: VariableId) -> list[VariableId] | None:
        color[v] = GREY
        stack_path.append(v)
        for w in succ[v]:
            if color[w] == GREY:
                i = stack_path.index(w)
                return stack_path[i:] + [w]
            if color[w] == WHITE:
                cycle = visit(w)
                if cycle is not None:
                    return cycle
        stack_path.pop()
        color[v] = BLACK
        return None

    for v in ids:
        if color[v] == WHITE:
            cycle = visit(v)
            if cycle is not None:
                return False, cycle
    return True, None


def topological_order(diagram: CausalDiagram) -> tuple[VariableId, ...]:
    """Kahn's algorithm with ties broken by ascending variable index."""
    ids = diagram.variable_ids
    indeg = {v: 0 for v in ids}
    for _, e in diagram.arrows:
        indeg[e] += 1
    ready = [v for v in ids if indeg[v] == 0]
    heapq.heapify(ready)
    out: list[VariableId] = []
    while ready:
        v = heapq.heappop(ready)
        out.append(v)
        for w in diagram.children_of(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(out) != len(ids):
        ok, cycle = check_acyclic(diagram)
        raise StructuralError(f"diagram is cyclic: {cycle}")
    return tuple(out)


@dataclass(frozen=True)
class Intervention:
    """A do-assignment: each listed variable is forced to a Boolean value."""

    assignments: Mapping[VariableId, bool]

    def __init__(self, assignments: Mapping[VariableId, bool] | Iterable[tuple[VariableId, bool]] = ()):
        object.__setattr__(self, "assignments", dict(assignments))

    @property
    def is_empty(self) -> bool:
        return not self.assignments

    def sorted_items(self) -> tuple[tuple[VariableId, bool], ...]:
        return tuple(sorted(self.assignments.items(), key=lambda kv: kv[0].index))

    def __eq__(self, other) -> bool:
        return isinstance(other, Intervention) and self.assignments == other.assignments

    def __hash__(self) -> int:
        return hash(self.sorted_items())

    def __str__(self) -> str:
        inner = ";".join(f"{v.name}={int(val)}" for v, val in self.sorted_items())
        return f"do({inner})"


@dataclass(frozen=True)
class WorldState:
    """A total assignment of Boolean values to the model's variables."""

    values: Mapping[VariableId, bool]

    def __init__(self, values: Mapping[VariableId, bool]):
        object.__setattr__(self, "values", dict(values))

    def __getitem__(self, vid: VariableId) -> bool:
        return self.values[vid]

    def __eq__(self, other) -> bool:
        return isinstance(other, WorldState) and self.values == other.values


class Scm:
    """A structural causal model: a diagram plus one CPT row set per variable.

    ``mechanisms[v]`` has ``2**len(parents_of(v))`` entries, each the
    probability that ``v`` is true under the corresponding parent
    assignment (bit j of the row index = value of the j-th parent in
    ascending-index order).
    """

    def __init__(self, diagram: CausalDiagram, mechanisms: Mapping[VariableId, Iterable[float]]):
        ok, cycle = check_acyclic(diagram)
        if not ok:
            raise StructuralError(f"SCM diagram must be acyclic, found cycle {cycle}")
        mechs: dict[VariableId, tuple[float, ...]] = {}
        for v in diagram.variable_ids:
            if v not in mechanisms:
                raise StructuralError(f"missing mechanism for {v}")
            rows = tuple(float(p) for p in mechanisms[v])
            expected = 1 << len(diagram.parents_of(v))
            if len(rows) != expected:
                raise StructuralError(
                    f"mechanism for {v} has {len(rows)} rows, expected {expected}"
                )
            if any(not (0.0 <= p <= 1.0) for p in rows):
                raise StructuralError(f"mechanism for {v} has probability outside [0, 1]")
            mechs[v] = rows
        extra = set(mechanisms) - set(diagram.variable_ids)
        if extra:
            raise StructuralError(f"mechanisms for undeclared variables: {sorted(extra)}")
        self.diagram = diagram
        self.mechanisms = mechs

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Scm)
            and self.diagram == other.diagram
            and self.mechanisms == other.mechanisms
        )

    def prob_true(self, vid: VariableId, parent_values: Mapping[VariableId, bool]) -> float:
        row = 0
        for j, p in enumerate(self.diagram.parents_of(vid)):
            row |= int(bool(parent_values[p])) << j
        return self.mechanisms[vid][row]


def mutilate(scm: Scm, intervention: Intervention) -> Scm:
    """Apply a do-operation: assigned variables lose their incoming arrows
    and get a constant mechanism pinned to the assigned value."""
    declared = set(scm.diagram.variable_ids)
    for v in intervention.assignments:
        if v not in declared:
            raise StructuralError(f"intervention on undeclared variable: {v}")
    if intervention.is_empty:
        return scm
    assigned = set(intervention.assignments)
    arrows = frozenset((c, e) for c, e in scm.diagram.arrows if e not in assigned)
    mechanisms = dict(scm.mechanisms)
    for v, value in intervention.assignments.items():
        mechanisms[v] = (1.0 if value else 0.0,)
    return Scm(scm.diagram.with_arrows(arrows), mechanisms)
