"""Query answering on a causal Bayesian network.

Two engines: exact posterior marginals by joint enumeration (the oracle,
usable up to 25 variables), and lambda/pi message passing, exact on
polytrees and refused elsewhere.  Beliefs are (P(x=0), P(x=1)) pairs.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .cbn import CausalBayesianNetwork
from .errors import (
    CapacityError,
    NotPolytreeError,
    StructuralError,
    ZeroProbabilityEvidenceError,
)
from .model import CausalDiagram, VariableId, topological_order

MAX_ENUMERATION_VARIABLES = 25
MESSAGE_TOLERANCE = 1e-12

Belief = tuple[float, float]


@dataclass(frozen=True)
class BeliefMap:
    """Posterior (P(x=0), P(x=1)) per variable."""

    beliefs: Mapping[VariableId, Belief]

    def __getitem__(self, vid: VariableId) -> Belief:
        return self.beliefs[vid]

    def items(self) -> Iterator[tuple[VariableId, Belief]]:
        return iter(sorted(self.beliefs.items(), key=lambda kv: kv[0].index))


@dataclass
class MessageStore:
    """Pi (parent-to-child) and lambda (child-to-parent) messages, one
    length-2 vector per directed structure edge."""

    pi: dict[tuple[VariableId, VariableId], tuple[float, float]] = field(default_factory=dict)
    lam: dict[tuple[VariableId, VariableId], tuple[float, float]] = field(default_factory=dict)


def _check_evidence(cbn: CausalBayesianNetwork, evidence: Mapping[VariableId, bool]):
    declared = set(cbn.structure.variable_ids)
    for v in evidence:
        if v not in declared:
            raise StructuralError(f"evidence on undeclared variable: {v}")


def enumerate_posterior(
    cbn: CausalBayesianNetwork,
    evidence: Mapping[VariableId, bool] | None = None,
) -> BeliefMap:
    """Exact marginals by summing the full joint over evidence-consistent
    states.  Independent of the message-passing path; serves as its oracle."""
    evidence = dict(evidence or {})
    _check_evidence(cbn, evidence)
    order = topological_order(cbn.structure)
    n = len(order)
    if n > MAX_ENUMERATION_VARIABLES:
        raise CapacityError(
            f"enumeration supports at most {MAX_ENUMERATION_VARIABLES} variables, got {n}"
        )
    pos = {v: i for i, v in enumerate(order)}
    # joint[s] over the first t variables (bit i of s = value of order[i]).
    joint = np.ones(1, dtype=np.float64)
    for t, v in enumerate(order):
        cpt = cbn.cpts[v]
        rows = np.asarray(cpt.rows, dtype=np.float64)
        states = np.arange(1 << t, dtype=np.int64)
        row_idx = np.zeros(1 << t, dtype=np.int64)
        for j, p in enumerate(cpt.parents):
            row_idx |= ((states >> pos[p]) & 1) << j
        p_true = rows[row_idx]
        p_false = 1.0 - p_true
        if v in evidence:
            if evidence[v]:
                joint = np.concatenate([np.zeros_like(joint), joint * p_true])
            else:
                joint = np.concatenate([joint * p_false, np.zeros_like(joint)])
        else:
            joint = np.concatenate([joint * p_false, joint * p_true])
    total = float(joint.sum())
    if total <= 0.0:
        raise ZeroProbabilityEvidenceError("evidence has probability zero")
    shaped = joint.reshape((2,) * n)  # axis i = order[n-1-i]
    beliefs = {}
    for v in order:
        axis = n - 1 - pos[v]
        axes = tuple(i for i in range(n) if i != axis)
        marginal = shaped.sum(axis=axes)
        beliefs[v] = (float(marginal[0] / total), float(marginal[1] / total))
    return BeliefMap(beliefs)


def is_polytree(structure: CausalDiagram) -> bool:
    """True iff the undirected skeleton of the DAG is acyclic."""
    parent = {v: v for v in structure.variable_ids}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in structure.arrows:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def _normalize(vec: tuple[float, float]) -> tuple[float, float]:
    s = vec[0] + vec[1]
    if s <= 0.0:
        raise ZeroProbabilityEvidenceError("evidence has probability zero")
    return (vec[0] / s, vec[1] / s)


def _diameter(structure: CausalDiagram) -> int:
    ids = structure.variable_ids
    adj: dict[VariableId, set[VariableId]] = {v: set() for v in ids}
    for a, b in structure.arrows:
        adj[a].add(b)
        adj[b].add(a)
    best = 0
    for src in ids:
        dist = {src: 0}
        frontier = [src]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        best = max(best, max(dist.values()))
    return best


def propagate(
    cbn: CausalBayesianNetwork,
    evidence: Mapping[VariableId, bool] | None = None,
    max_sweeps: int | None = None,
) -> tuple[BeliefMap, MessageStore]:
    """Lambda/pi belief propagation; exact on polytrees.

    Evidence enters as a point-mass likelihood at each observed node.
    Messages update in synchronous sweeps until the largest change drops
    below ``MESSAGE_TOLERANCE``; on a polytree the fixed point is reached
    within twice the skeleton diameter.  Refuses non-polytree structures.
    """
    evidence = dict(evidence or {})
    _check_evidence(cbn, evidence)
    if not is_polytree(cbn.structure):
        raise NotPolytreeError()
    ids = list(cbn.structure.variable_ids)
    parents = {v: cbn.structure.parents_of(v) for v in ids}
    children = {v: cbn.structure.children_of(v) for v in ids}

    def indicator(v: VariableId) -> tuple[float, float]:
        if v not in evidence:
            return (1.0, 1.0)
        return (0.0, 1.0) if evidence[v] else (1.0, 0.0)

    pi_msg: dict[tuple[VariableId, VariableId], tuple[float, float]] = {}
    lam_msg: dict[tuple[VariableId, VariableId], tuple[float, float]] = {}
    for v in ids:
        for c in children[v]:
            pi_msg[(v, c)] = (0.5, 0.5)
        for p in parents[v]:
            lam_msg[(v, p)] = (1.0, 1.0)

    def pi_value(v: VariableId) -> tuple[float, float]:
        cpt = cbn.cpts[v]
        ps = parents[v]
        out = [0.0, 0.0]
        for bits in itertools.product((0, 1), repeat=len(ps)):
            weight = 1.0
            for p, b in zip(ps, bits):
                weight *= pi_msg[(p, v)][b]
            row = 0
            for j, b in enumerate(bits):
                row |= b << j
            p_true = cpt.rows[row]
            out[1] += weight * p_true
            out[0] += weight * (1.0 - p_true)
        return (out[0], out[1])

    def lam_value(v: VariableId) -> tuple[float, float]:
        out = list(indicator(v))
        for c in children[v]:
            msg = lam_msg[(c, v)]
            out[0] *= msg[0]
            out[1] *= msg[1]
        return (out[0], out[1])

    def new_pi_message(v: VariableId, child: VariableId) -> tuple[float, float]:
        # Belief at v excluding the lambda contribution of this child.
        base = pi_value(v)
        ind = indicator(v)
        vec = [base[0] * ind[0], base[1] * ind[1]]
        for c in children[v]:
            if c == child:
                continue
            msg = lam_msg[(c, v)]
            vec[0] *= msg[0]
            vec[1] *= msg[1]
        s = vec[0] + vec[1]
        if s <= 0.0:
            return (0.0, 0.0)
        return (vec[0] / s, vec[1] / s)

    def new_lam_message(v: VariableId, parent: VariableId) -> tuple[float, float]:
        cpt = cbn.cpts[v]
        ps = parents[v]
        others = [p for p in ps if p != parent]
        lam_v = lam_value(v)
        out = [0.0, 0.0]
        for x in (0, 1):
            acc = 0.0
            for bits in itertools.product((0, 1), repeat=len(others)):
                weight = 1.0
                assignment = {}
                for p, b in zip(others, bits):
                    weight *= pi_msg[(p, v)][b]
                    assignment[p] = b
                assignment[parent] = x
                row = 0
                for j, p in enumerate(ps):
                    row |= assignment[p] << j
                p_true = cpt.rows[row]
                acc += weight * (lam_v[0] * (1.0 - p_true) + lam_v[1] * p_true)
            out[x] = acc
        s = out[0] + out[1]
        if s > 0.0:
            out = [out[0] / s, out[1] / s]
        return (out[0], out[1])

    if max_sweeps is None:
        max_sweeps = 2 * max(1, _diameter(cbn.structure)) + 2
    for _ in range(max_sweeps):
        delta = 0.0
        new_pi = {}
        new_lam = {}
        for v in ids:
            for c in children[v]:
                new_pi[(v, c)] = new_pi_message(v, c)
            for p in parents[v]:
                new_lam[(v, p)] = new_lam_message(v, p)
        for key, val in new_pi.items():
            old = pi_msg[key]
            delta = max(delta, abs(val[0] - old[0]), abs(val[1] - old[1]))
        for key, val in new_lam.items():
            old = lam_msg[key]
            delta = max(delta, abs(val[0] - old[0]), abs(val[1] - old[1]))
        pi_msg.update(new_pi)
        lam_msg.update(new_lam)
        if delta < MESSAGE_TOLERANCE:
            break

    beliefs = {}
    for v in ids:
        pi_v = pi_value(v)
        lam_v = lam_value(v)
        beliefs[v] = _normalize((pi_v[0] * lam_v[0], pi_v[1] * lam_v[1]))
    store = MessageStore(pi=dict(pi_msg), lam=dict(lam_msg))
    return BeliefMap(beliefs), store
