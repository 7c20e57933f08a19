"""One round of a full-information protocol, and its iteration.

A round turns a complex of global states into the complex of states
reachable after one message exchange.  For each facet and each permitted
instant graph restricted to the facet's participants, every participant
collects the states it receives; the resulting global states generate the
next complex.  Two executions that give a process the same view give it the
same vertex; interning views is exactly what glues indistinguishable
executions together.

In colored mode a state is (process, received states keyed by sender); in
colorless mode a state is just the set of received values, so senders (and
duplicate receptions) are indistinguishable and equal views collapse to one
vertex even within a single execution.

Each round is packaged as a stage: the new complex, the carrier map sending
a previous simplex to the down-set of states reachable from its faces, and
the dual projection down to the previous level.  The chain-subdivision stage
(vertices = previous simplices, facets = maximal chains) is the functorial
counterpart of the colorless immediate-snapshot round and is provided as a
named constructor, as is the chromatic subdivision for colored inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Any, Hashable, Iterable, Sequence

from .adversary import IIS, Adversary
from .complexes import (
    Complex,
    Simplex,
    Subcomplex,
    Vertex,
    _maximal,
    canonical_key,
    check_carrier_map,
    make_complex,
    simplex_budget,
)
from .duality import dual_projection
from .errors import CarrierAxiomError, DomainError, ResourceLimitError, ValidationError

COLORED = "colored"
COLORLESS = "colorless"
MODES = (COLORED, COLORLESS)


@dataclass
class CarrierStage:
    """One protocol round: complex, carrier from the previous level, dual projection."""

    level: int
    source: Complex
    complex: Complex
    carrier: dict[Simplex, Subcomplex]
    projection: dict[Simplex, Simplex]
    labels: dict[Vertex, Any]
    kind: str

    def carrier_of(self, sigma: Simplex) -> Subcomplex:
        try:
            return self.carrier[sigma]
        except KeyError:
            raise DomainError(f"{sigma!r} is not a simplex of the previous level") from None

    def project(self, tau: Simplex) -> Simplex:
        try:
            return self.projection[tau]
        except KeyError:
            raise DomainError(f"{tau!r} is not a simplex of this level") from None


def initial_stage(input_complex: Complex) -> CarrierStage:
    """Level 0: the input complex with the identity carrier and projection."""
    carrier = {s: Subcomplex(input_complex, [s]) for s in input_complex}
    projection = {s: s for s in input_complex}
    labels = {v: v.label for v in input_complex.vertices}
    return CarrierStage(0, input_complex, input_complex, carrier, projection, labels, "input")


def colored_simplex(values: Sequence[Hashable], processes: Sequence[int] | None = None) -> Complex:
    """A single global state with per-process values; labels are (process, value)."""
    procs = list(processes) if processes is not None else list(range(len(values)))
    if len(procs) != len(values) or len(set(procs)) != len(procs):
        raise ValidationError("need one distinct process per value")
    return make_complex([[(p, v) for p, v in zip(procs, values)]])


def _colored_participants(sigma: Simplex) -> dict[int, Vertex]:
    by_proc: dict[int, Vertex] = {}
    for v in sigma:
        lab = v.label
        if not (isinstance(lab, tuple) and len(lab) == 2 and isinstance(lab[0], int)):
            raise ValidationError(
                "colored mode needs vertex labels of the form (process, state)"
            )
        if lab[0] in by_proc:
            raise ValidationError(f"two vertices of {sigma!r} share process {lab[0]}")
        by_proc[lab[0]] = v
    return by_proc


def _in_sets(arcs: frozenset[tuple[int, int]], procs: Iterable[int]) -> dict[int, tuple[int, ...]]:
    return {p: tuple(sorted(u for (u, v) in arcs if v == p)) for p in procs}


def one_round(
    prev: CarrierStage,
    adversary: Adversary,
    mode: str,
    *,
    max_simplices: int | None = None,
) -> CarrierStage:
    """Run one communication round of the adversary on a stage.

    Returns the next stage: its complex is generated by the reachable global
    states, the carrier of a previous simplex is the down-set of states
    reachable from that simplex's faces, and the projection sends every new
    simplex to the smallest previous simplex carrying it (the join of the
    values its views mention).
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}")
    letters = adversary.letters()
    prev_complex = prev.complex

    # Reachable global states, per previous simplex.  Distinct letters that
    # induce the same communication pattern on the participants are one
    # pattern; views are what counts.
    states: dict[Simplex, set[frozenset]] = {}
    for tau in prev_complex:
        if mode == COLORED:
            by_proc = _colored_participants(tau)
            bad = [p for p in by_proc if p > adversary.d]
            if bad:
                raise ValidationError(
                    f"process {bad[0]} of {tau!r} outside the adversary's range 0..{adversary.d}"
                )
            procs = sorted(by_proc)
        else:
            if len(tau) > adversary.d + 1:
                raise ValidationError(
                    f"facet {tau!r} has {len(tau)} participants, adversary supports {adversary.d + 1}"
                )
            procs = list(range(len(tau)))
            by_proc = {p: tau.verts[p] for p in procs}
        patterns = {g.induced_arcs(procs) for g in letters}
        tau_states = set()
        for arcs in patterns:
            ins = _in_sets(arcs, procs)
            if mode == COLORED:
                state = frozenset(
                    (p, tuple((q, by_proc[q]) for q in ins[p])) for p in procs
                )
            else:
                state = frozenset(frozenset(by_proc[q] for q in ins[p]) for p in procs)
            tau_states.add(state)
        states[tau] = tau_states

    payloads = sorted(
        {view for tau_states in states.values() for st in tau_states for view in st},
        key=canonical_key,
    )
    vertex_of = {payload: Vertex(i, payload) for i, payload in enumerate(payloads)}

    def to_simplex(state: frozenset) -> Simplex:
        return Simplex(vertex_of[view] for view in state)

    new_complex = Complex(
        (to_simplex(st) for tau_states in states.values() for st in tau_states),
        max_simplices=max_simplices,
    )

    # Carrier: accumulate over the face poset, dimension first, so that each
    # previous simplex also carries the states of all its faces.
    gens: dict[Simplex, tuple[Simplex, ...]] = {}
    carrier: dict[Simplex, Subcomplex] = {}
    for tau in prev_complex:
        collected = [to_simplex(st) for st in states[tau]]
        if tau.dim > 0:
            for face_verts in combinations(tau.verts, len(tau.verts) - 1):
                collected.extend(gens[Simplex(face_verts)])
        gens[tau] = _maximal(collected)
        carrier[tau] = Subcomplex(new_complex, gens[tau])

    base = {}
    for payload, v in vertex_of.items():
        if mode == COLORED:
            _, view = payload
            base[v] = Simplex(prev_vertex for (_, prev_vertex) in view)
        else:
            base[v] = Simplex(payload)
    projection = {
        s: Simplex(u for v in s for u in base[v]) for s in new_complex
    }
    labels = {v: payload for payload, v in vertex_of.items()}
    return CarrierStage(prev.level + 1, prev_complex, new_complex, carrier, projection, labels, "round")


def iterate(
    input_complex: Complex,
    adversary: Adversary,
    mode: str,
    rounds: int,
    *,
    max_simplices: int | None = None,
) -> list[CarrierStage]:
    """Stages 0..rounds of the adversary on the input complex."""
    if rounds < 0:
        raise ValidationError("round count must be >= 0")
    stages = [initial_stage(input_complex)]
    for _ in range(rounds):
        stages.append(one_round(stages[-1], adversary, mode, max_simplices=max_simplices))
    return stages


def barycentric_stage(prev: CarrierStage, *, max_simplices: int | None = None) -> CarrierStage:
    """Chain subdivision: vertices are previous simplices, facets are maximal chains.

    The carrier of a previous simplex is the complex of chains inside its
    down-set; the projection sends a chain to its top element (its join).
    """
    prev_complex = prev.complex
    elements = list(prev_complex)
    budget = simplex_budget(max_simplices)

    vertex_of = {s: Vertex(i, s) for i, s in enumerate(elements)}

    strict_above = {
        s: [t for t in elements if s is not t and s.issubset(t)] for s in elements
    }
    chains: list[tuple[Simplex, ...]] = []

    def grow(chain: tuple[Simplex, ...]):
        chains.append(chain)
        if len(chains) > budget:
            raise ResourceLimitError(
                f"chain subdivision exceeds the simplex budget of {budget}"
            )
        for t in strict_above[chain[-1]]:
            grow(chain + (t,))

    for s in elements:
        grow((s,))

    new_complex = Complex(
        (Simplex(vertex_of[s] for s in chain) for chain in chains),
        assume_closed=True,
        max_simplices=max_simplices,
    )

    # Maximal chains of a simplex's down-set: flags built face by face.
    flags: dict[Simplex, list[tuple[Simplex, ...]]] = {}
    for s in elements:
        if s.dim == 0:
            flags[s] = [(s,)]
        else:
            out = []
            for face_verts in combinations(s.verts, len(s.verts) - 1):
                for flag in flags[Simplex(face_verts)]:
                    out.append(flag + (s,))
            flags[s] = out
    carrier = {
        s: Subcomplex(new_complex, [Simplex(vertex_of[t] for t in flag) for flag in flags[s]])
        for s in elements
    }
    # Chains grow upward, so the join of a chain is its last element.
    projection = {
        Simplex(vertex_of[s] for s in chain): chain[-1] for chain in chains
    }
    labels = {v: s for s, v in vertex_of.items()}
    return CarrierStage(prev.level + 1, prev_complex, new_complex, carrier, projection, labels, "chain")


def barycentric_stages(
    input_complex: Complex, rounds: int, *, max_simplices: int | None = None
) -> list[CarrierStage]:
    """Stages 0..rounds of the chain subdivision."""
    if rounds < 0:
        raise ValidationError("round count must be >= 0")
    stages = [initial_stage(input_complex)]
    for _ in range(rounds):
        stages.append(barycentric_stage(stages[-1], max_simplices=max_simplices))
    return stages


def chromatic_stage(prev: CarrierStage, *, d: int | None = None, max_simplices: int | None = None) -> CarrierStage:
    """One round of the immediate-snapshot adversary on a colored stage."""
    procs = set()
    for v in prev.complex.vertices:
        lab = v.label
        if not (isinstance(lab, tuple) and len(lab) == 2 and isinstance(lab[0], int)):
            raise ValidationError("chromatic subdivision needs (process, state) vertex labels")
        procs.add(lab[0])
    if d is None:
        d = max(procs, default=0)
    return one_round(prev, Adversary(d, IIS), COLORED, max_simplices=max_simplices)


def project_to_level(stages: Sequence[CarrierStage], tau: Simplex, from_level: int, to_level: int) -> Simplex:
    """Compose the stage projections from one level down to an earlier one."""
    if not (0 <= to_level <= from_level < len(stages)):
        raise DomainError(f"levels {from_level}->{to_level} outside the stage range")
    current = tau
    for level in range(from_level, to_level, -1):
        current = stages[level].project(current)
    return current


@dataclass(frozen=True)
class ProjectionReport:
    roundtrip: bool
    minimal: bool
    surjective: bool

    @property
    def ok(self) -> bool:
        return self.roundtrip and self.minimal and self.surjective


def verify_projection(stage: CarrierStage) -> ProjectionReport:
    """Check the projection against its defining property, element by element.

    Every simplex must lie in the carrier of its projection, no proper face
    of the projection may already carry it, and every previous simplex must
    be hit.
    """
    roundtrip = True
    minimal = True
    for tau in stage.complex:
        rho = stage.projection[tau]
        if tau not in stage.carrier[rho]:
            roundtrip = False
        if any(tau in stage.carrier[f] for f in rho.faces(proper=True)):
            minimal = False
    surjective = set(stage.projection.values()) == set(stage.source.simplices)
    return ProjectionReport(roundtrip, minimal, surjective)


@dataclass(frozen=True)
class StageReport:
    carrier_monotone: bool
    carrier_strict: bool
    carrier_total: bool
    projection_matches_dual: bool
    projection_roundtrip: bool
    projection_minimal: bool
    projection_surjective: bool
    joinlift_injective_on_principal: bool

    @property
    def ok(self) -> bool:
        return all(
            (
                self.carrier_monotone,
                self.carrier_strict,
                self.carrier_total,
                self.projection_matches_dual,
                self.projection_roundtrip,
                self.projection_minimal,
                self.projection_surjective,
                self.joinlift_injective_on_principal,
            )
        )


def check_stage_axioms(stage: CarrierStage) -> StageReport:
    """Full axiom audit of a stage; report-style, never raises.

    Covers the carrier-map axioms, agreement of the stored projection with
    the dual computed from the carrier alone, the projection's defining
    properties, and injectivity of the lifted carrier on principal down-sets
    (distinct simplices must have distinct images).
    """
    carrier_report = check_carrier_map(stage.carrier, stage.source, stage.complex)
    try:
        rho = dual_projection(stage.carrier, stage.source, stage.complex)
        matches = rho == stage.projection
    except CarrierAxiomError:
        matches = False
    proj = verify_projection(stage)
    images = [stage.carrier[s].generators for s in stage.source]
    injective = len(set(images)) == len(images)
    return StageReport(
        carrier_monotone=carrier_report.monotone,
        carrier_strict=carrier_report.strict,
        carrier_total=carrier_report.total,
        projection_matches_dual=matches,
        projection_roundtrip=proj.roundtrip,
        projection_minimal=proj.minimal,
        projection_surjective=proj.surjective,
        joinlift_injective_on_principal=injective,
    )
