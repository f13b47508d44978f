"""Interventional causal structure learning.

Starting from a fully connected directed graph, arrows are removed by
influence tests (do-operations on the source, optionally locking a
conditioning set of its neighbours) when the source is doable, and by
stratified observational independence tests when it is not.  Conditioning
order grows PC-style.  The surviving mixed graph is then resolved into a
DAG, preferring to drop candidate arrows that were never confirmed by an
intervention.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, PolicyError, StructuralError
from .model import Arrow, CausalDiagram, Intervention, Variable, VariableId, check_acyclic
from .rng import derive_seed
from .simulator import Dataset, EnvironmentHandle
from .stats import TestOutcome, cond_independent, distributions_differ


class EvidenceKind(Enum):
    DO_CONFIRMED = "do_confirmed"
    ND_CANDIDATE = "nd_candidate"
    FLAGGED = "flagged"


Witness = tuple[tuple[VariableId, bool | None], ...]


@dataclass(frozen=True)
class EdgeEvidence:
    """What the algorithm knows about one directed arrow.

    ``best_statistic`` is the arrow's supporting chi-squared score: for
    do-confirmed arrows the minimum over all conclusive assignment tests
    (its weakest confirmation), for candidate arrows the largest observed
    dependence.  ``removal_witness`` is set on removed arrows only: the
    lock assignment (or conditioning set) that showed no influence.
    """

    kind: EvidenceKind
    best_statistic: float = 0.0
    removal_witness: Witness | None = None


@dataclass
class CandidateGraph:
    """Working graph of the discovery loop: directed arrows with evidence.

    Both directions of a pair may be present simultaneously; after the
    loop finishes that only happens when neither direction could be ruled
    out (at least one of them resting on observational evidence alone).
    """

    variables: tuple[Variable, ...]
    arrows: dict[Arrow, EdgeEvidence]
    removed: dict[Arrow, EdgeEvidence] = field(default_factory=dict)

    def __post_init__(self):
        declared = {v.id for v in self.variables}
        for a, b in self.arrows:
            if a == b:
                raise StructuralError(f"self-loop on {a}")
            if a not in declared or b not in declared:
                raise StructuralError(f"dangling arrow {a} -> {b}")

    @property
    def variable_ids(self) -> tuple[VariableId, ...]:
        return tuple(v.id for v in self.variables)

    def is_doable(self, vid: VariableId) -> bool:
        for v in self.variables:
            if v.id == vid:
                return v.doable
        raise StructuralError(f"unknown variable {vid}")

    def neighbors(self, vid: VariableId) -> tuple[VariableId, ...]:
        out = set()
        for a, b in self.arrows:
            if a == vid:
                out.add(b)
            elif b == vid:
                out.add(a)
        return tuple(sorted(out))

    def undirected_nd_pairs(self) -> tuple[tuple[VariableId, VariableId], ...]:
        pairs = []
        for (a, b), ev in self.arrows.items():
            if a.index < b.index and (b, a) in self.arrows:
                if (
                    ev.kind is not EvidenceKind.DO_CONFIRMED
                    and self.arrows[(b, a)].kind is not EvidenceKind.DO_CONFIRMED
                ):
                    pairs.append((a, b))
        return tuple(sorted(pairs))


@dataclass(frozen=True)
class DiscoveryConfig:
    alpha: float = 0.05
    interventions_per_assignment: int = 20
    observational_samples: int = 500
    max_conditioning_order: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.interventions_per_assignment <= 0:
            raise ConfigError("interventions_per_assignment must be positive")
        if self.observational_samples <= 0:
            raise ConfigError("observational_samples must be positive")
        if self.max_conditioning_order < 0:
            raise ConfigError("max_conditioning_order must be non-negative")


def _assignment_witness(assignment: Mapping[VariableId, bool]) -> Witness:
    return tuple(sorted(assignment.items(), key=lambda kv: kv[0].index))


def influence_test(
    env: EnvironmentHandle,
    a: VariableId,
    b: VariableId,
    lock: Iterable[VariableId],
    config: DiscoveryConfig,
) -> list[tuple[dict[VariableId, bool], TestOutcome]]:
    """Does forcing ``a`` move ``b``, for every assignment of ``lock``?

    For each of the 2^|lock| lock assignments, draws
    ``interventions_per_assignment`` records under do(a=0) and do(a=1)
    (with the lock held) and compares b's distributions.
    """
    doable = {v.id: v.doable for v in env.variables}
    lock = sorted(set(lock), key=lambda v: v.index)
    if a in lock or b in lock:
        raise PolicyError("lock must exclude the tested pair")
    if not doable.get(a, False):
        raise PolicyError(f"cannot intervene on non-doable {a}")
    for v in lock:
        if not doable.get(v, False):
            raise PolicyError(f"cannot lock non-doable {v}")
    n = config.interventions_per_assignment
    results = []
    for bits in itertools.product((0, 1), repeat=len(lock)):
        assignment = {v: bool(u) for v, u in zip(lock, bits)}
        tokens = [a.index, b.index]
        for v, u in sorted(assignment.items(), key=lambda kv: kv[0].index):
            tokens.extend((v.index, int(u)))
        arms = []
        for arm in (0, 1):
            seed = derive_seed(config.seed, "influence", *tokens, "arm", arm)
            arms.append(env.intervene(Intervention({a: bool(arm), **assignment}), n, seed))
        outcome = distributions_differ(arms[0], arms[1], b, config.alpha)
        results.append((assignment, outcome))
    return results


def run_discovery(
    env: EnvironmentHandle,
    variables: Sequence[Variable] | None = None,
    config: DiscoveryConfig = DiscoveryConfig(),
) -> CandidateGraph:
    """The iterative influence/independence pruning loop.

    Deterministic for a fixed (environment seed behaviour, config): nodes
    are visited in ascending index order, conditioning subsets in sorted
    combination order, assignments in ascending binary order, and every
    test derives its sampling seed from (config.seed, source, target,
    lock assignment).
    """
    env_vars = tuple(sorted(env.variables, key=lambda v: v.id.index))
    if variables is None:
        variables = env_vars
    else:
        variables = tuple(sorted(variables, key=lambda v: v.id.index))
        if variables != env_vars:
            raise StructuralError("variables do not match the environment")
    if not variables:
        raise ConfigError("no variables to learn over")
    ids = [v.id for v in variables]
    doable = {v.id: v.doable for v in variables}

    observations = env.observe(
        config.observational_samples, derive_seed(config.seed, "observational")
    )

    graph = CandidateGraph(
        variables,
        {
            (a, b): EdgeEvidence(
                EvidenceKind.DO_CONFIRMED if doable[a] else EvidenceKind.ND_CANDIDATE
            )
            for a in ids
            for b in ids
            if a != b
        },
    )
    # Supporting statistics accumulated across all surviving tests.
    min_do_stat: dict[Arrow, float] = {}
    max_nd_stat: dict[Arrow, float] = {}

    k = 0
    while k <= config.max_conditioning_order and any(
        len(graph.neighbors(v)) > k for v in ids
    ):
        for a in ids:
            if len(graph.neighbors(a)) <= k:
                continue
            targets = sorted(
                (b for (x, b) in graph.arrows if x == a), key=lambda v: v.index
            )
            for b in targets:
                arrow = (a, b)
                if arrow not in graph.arrows:
                    continue
                if doable[a]:
                    pool = [
                        v for v in graph.neighbors(a) if v != b and doable[v]
                    ]
                else:
                    pool = [v for v in graph.neighbors(a) if v != b]
                removed = False
                for subset in itertools.combinations(pool, k):
                    if doable[a]:
                        outcomes = influence_test(env, a, b, subset, config)
                        for assignment, outcome in outcomes:
                            if outcome.inconclusive:
                                continue
                            if not outcome.reject_independence:
                                graph.removed[arrow] = EdgeEvidence(
                                    EvidenceKind.DO_CONFIRMED,
                                    outcome.statistic,
                                    _assignment_witness(assignment),
                                )
                                del graph.arrows[arrow]
                                removed = True
                                break
                            prev = min_do_stat.get(arrow)
                            stat = outcome.statistic
                            min_do_stat[arrow] = (
                                stat if prev is None else min(prev, stat)
                            )
                    else:
                        outcome = cond_independent(
                            observations, a, b, frozenset(subset), config.alpha
                        )
                        if not outcome.inconclusive and not outcome.reject_independence:
                            graph.removed[arrow] = EdgeEvidence(
                                EvidenceKind.ND_CANDIDATE,
                                outcome.statistic,
                                tuple((v, None) for v in subset),
                            )
                            del graph.arrows[arrow]
                            removed = True
                        else:
                            prev = max_nd_stat.get(arrow, 0.0)
                            max_nd_stat[arrow] = max(prev, outcome.statistic)
                    if removed:
                        break
        k += 1

    for arrow in graph.arrows:
        if doable[arrow[0]]:
            graph.arrows[arrow] = EdgeEvidence(
                EvidenceKind.DO_CONFIRMED, min_do_stat.get(arrow, 0.0)
            )
        else:
            graph.arrows[arrow] = EdgeEvidence(
                EvidenceKind.ND_CANDIDATE, max_nd_stat.get(arrow, 0.0)
            )
    return graph


@dataclass(frozen=True)
class ResolvedGraph:
    """A DAG produced from a candidate graph, with per-arrow evidence."""

    diagram: CausalDiagram
    evidence: Mapping[Arrow, EdgeEvidence]


def _find_cycle(ids, arrows) -> list[Arrow] | None:
    succ: dict[VariableId, list[VariableId]] = {v: [] for v in ids}
    for a, b in arrows:
        succ[a].append(b)
    for v in succ:
        succ[v].sort()
    WHITE, GREY, BLACK = 0, 1, 2
    color = {v: WHITE for v in ids}
    path: list[VariableId] = []

    def visit(v) -> list[Arrow] | None:
        color[v] = GREY
        path.append(v)
        for w in succ[v]:
            if color[w] == GREY:
                i = path.index(w)
                cyc = path[i:] + [w]
                return list(zip(cyc[:-1], cyc[1:]))
            if color[w] == WHITE:
                found = visit(w)
                if found:
                    return found
        path.pop()
        color[v] = BLACK
        return None

    for v in sorted(ids):
        if color[v] == WHITE:
            found = visit(v)
            if found:
                return found
    return None


def resolve_to_dag(
    candidate: CandidateGraph,
    observations: Dataset | None = None,
    alpha: float = 0.05,
) -> ResolvedGraph:
    """Turn the surviving mixed graph into a DAG.

    Handling of the ambiguous configurations, in order: candidate pairs
    explained by an established common cause are dropped (checked against
    ``observations`` when provided); remaining undirected candidate pairs
    are oriented low-index to high-index and flagged; remaining arrows
    that never received do-confirmation are flagged as potentially
    spurious; finally cycles are broken by removing the least significant
    arrow, preferring flagged/candidate arrows over do-confirmed ones.
    """
    working: dict[Arrow, EdgeEvidence] = dict(candidate.arrows)
    ids = list(candidate.variable_ids)

    # Candidate pairs whose correlation an established confounder explains.
    for a, b in candidate.undirected_nd_pairs():
        if (a, b) not in working or (b, a) not in working:
            continue
        if observations is None:
            continue
        for c in sorted(ids):
            if c in (a, b):
                continue
            if (c, a) in working and (c, b) in working:
                outcome = cond_independent(observations, a, b, {c}, alpha)
                if not outcome.inconclusive and not outcome.reject_independence:
                    del working[(a, b)]
                    del working[(b, a)]
                    break

    # Undirected candidate pairs: orient by index and flag.
    for a, b in sorted(working):
        if (b, a) in working and (a, b) in working:
            ev_ab, ev_ba = working[(a, b)], working[(b, a)]
            do_ab = ev_ab.kind is EvidenceKind.DO_CONFIRMED
            do_ba = ev_ba.kind is EvidenceKind.DO_CONFIRMED
            if do_ab and do_ba:
                continue  # left to cycle breaking on statistics
            if do_ab != do_ba:
                # One direction rests on interventions; drop the other.
                victim = (a, b) if do_ba else (b, a)
                del working[victim]
            else:
                lo, hi = (a, b) if a.index < b.index else (b, a)
                del working[(hi, lo)]
                working[(lo, hi)] = replace(
                    working[(lo, hi)], kind=EvidenceKind.FLAGGED
                )

    # Surviving observational-only arrows are kept but flagged.
    for arrow, ev in list(working.items()):
        if ev.kind is EvidenceKind.ND_CANDIDATE:
            working[arrow] = replace(ev, kind=EvidenceKind.FLAGGED)

    # Break remaining cycles: flagged arrows first, then weakest score.
    def victim_key(arrow: Arrow):
        ev = working[arrow]
        do_confirmed = ev.kind is EvidenceKind.DO_CONFIRMED
        return (do_confirmed, ev.best_statistic, arrow[0].index, arrow[1].index)

    while True:
        cycle = _find_cycle(ids, working)
        if cycle is None:
            break
        victim = min(cycle, key=victim_key)
        del working[victim]

    diagram = CausalDiagram(candidate.variables, working.keys())
    ok, _ = check_acyclic(diagram)
    assert ok, "cycle breaking must yield a DAG"
    return ResolvedGraph(diagram, dict(working))


@dataclass(frozen=True)
class EdgeDiff:
    """Classified comparison of a learned graph against ground truth."""

    correct: frozenset[Arrow]
    missed: frozenset[Arrow]
    added: frozenset[Arrow]
    flagged_spurious: frozenset[Arrow]
    bidirectional: frozenset[tuple[VariableId, VariableId]]
    precision: float
    recall: float


def diff_graphs(
    learned: ResolvedGraph | CandidateGraph,
    truth: CausalDiagram,
) -> EdgeDiff:
    """Classify learned arrows as correct/missed/added against the truth."""
    if isinstance(learned, ResolvedGraph):
        arrows = dict(learned.evidence)
        learned_vars = learned.diagram.variable_ids
    else:
        arrows = dict(learned.arrows)
        learned_vars = learned.variable_ids
    if set(learned_vars) != set(truth.variable_ids):
        raise StructuralError("learned and truth graphs declare different variables")

    learned_set = set(arrows)
    truth_set = set(truth.arrows)
    correct = learned_set & truth_set
    missed = truth_set - learned_set
    added = learned_set - truth_set
    flagged = {
        arrow
        for arrow in added
        if arrows[arrow].kind in (EvidenceKind.FLAGGED, EvidenceKind.ND_CANDIDATE)
    }
    bidirectional = frozenset(
        (a, b) for (a, b) in learned_set if (b, a) in learned_set and a.index < b.index
    )
    precision = 1.0 if not (correct or added) else len(correct) / (len(correct) + len(added))
    recall = 1.0 if not (correct or missed) else len(correct) / (len(correct) + len(missed))
    return EdgeDiff(
        frozenset(correct),
        frozenset(missed),
        frozenset(added),
        frozenset(flagged),
        bidirectional,
        precision,
        recall,
    )
