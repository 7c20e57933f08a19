"""Colorless tasks and the bounded-round solvability search.

A colorless task relates input value sets to allowed output value sets
through a monotone specification; solving it after n rounds means finding an
order-preserving map from the round-n complex to the output complex whose
value on every simplex is allowed for that simplex's round-0 origin.

The search branches over vertices only.  Because specification images and
the output complex are both down-closed, a monotone carried map exists at a
round exactly when the vertices can be given single output vertices whose
joins stay inside the specification; the monotone mode (simplex-valued
maps) and the simplicial mode (vertex maps) therefore decide the same
question, and both are driven by the same backjumping core.  Both remain
exposed: a witness of either kind re-validates as a monotone carried map.

A negative verdict is evidence about the searched depths only, never an
impossibility proof; the verdict object carries that caveat explicitly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations, product
from typing import Hashable, Iterable

from .adversary import FAMILIES, IIS, Adversary
from .complexes import (
    Complex,
    Simplex,
    Subcomplex,
    Vertex,
    label_text,
    make_complex,
)
from .errors import DomainError, SearchTimeout, ValidationError
from .protocol import (
    COLORED,
    COLORLESS,
    CarrierStage,
    barycentric_stages,
    iterate,
    project_to_level,
)

SIMPLICIAL = "simplicial"
ORDER_PRESERVING = "order_preserving"
SEARCH_MODES = (SIMPLICIAL, ORDER_PRESERVING)


@dataclass
class ColorlessTask:
    """Input complex, output complex, and a monotone specification."""

    input: Complex
    output: Complex
    delta: dict[Simplex, Subcomplex]

    def allowed(self, sigma: Simplex) -> Subcomplex:
        try:
            return self.delta[sigma]
        except KeyError:
            raise DomainError(f"specification undefined on {sigma!r}") from None


@dataclass(frozen=True)
class TaskReport:
    total: bool
    monotone: bool
    images_nonempty: bool
    images_well_formed: bool

    @property
    def ok(self) -> bool:
        return self.total and self.monotone and self.images_nonempty and self.images_well_formed


def validate_task(task: ColorlessTask) -> TaskReport:
    """Report-style validation of a task specification."""
    total = all(s in task.delta for s in task.input)
    well_formed = all(
        isinstance(img, Subcomplex) and img.parent is task.output
        for img in task.delta.values()
    )
    nonempty = all(not img.is_empty for img in task.delta.values())
    monotone = True
    if total and well_formed:
        elems = list(task.input)
        for s in elems:
            for t in elems:
                if s is not t and s.issubset(t) and not task.delta[s].issubset(task.delta[t]):
                    monotone = False
    return TaskReport(total, monotone, nonempty, well_formed)


def k_set_agreement_task(values: Iterable[Hashable], k: int) -> ColorlessTask:
    """Outputs must be at most k of the values present in the input.

    The input complex is the full simplex on the values, the output complex
    its (k-1)-skeleton, and a simplex of inputs allows every output set of at
    most k of its own values.  k = 1 is consensus; k = number of values is
    trivially solvable by deciding the input.
    """
    vals = sorted(set(values), key=lambda v: (str(type(v).__name__), str(v)))
    if not vals:
        raise ValidationError("need at least one value")
    if not (1 <= k <= len(vals)):
        raise ValidationError(f"k must be within 1..{len(vals)}")
    input_complex = make_complex([vals])
    output = input_complex.skeleton(k - 1)
    delta = {}
    for sigma in input_complex:
        out_verts = [output.vertex_with_label(v.label) for v in sigma]
        if len(sigma) <= k:
            gens = [Simplex(out_verts)]
        else:
            gens = [Simplex(c) for c in combinations(out_verts, k)]
        delta[sigma] = Subcomplex(output, gens)
    return ColorlessTask(input_complex, output, delta)


def consensus_task(values: Iterable[Hashable]) -> ColorlessTask:
    """Everyone decides one common input value."""
    return k_set_agreement_task(values, 1)


def barycentric_agreement_task(input_complex: Complex, subdivision_rounds: int) -> ColorlessTask:
    """Decide a simplex of the m-fold chain subdivision carried by the origin.

    A fixture task: solvable after m subdivision rounds by the identity, and
    the specification is the composed subdivision carrier itself.
    """
    stages = barycentric_stages(input_complex, subdivision_rounds)
    output = stages[-1].complex
    delta = {}
    for sigma in input_complex:
        members = [
            tau
            for tau in output
            if project_to_level(stages, tau, subdivision_rounds, 0).issubset(sigma)
        ]
        delta[sigma] = Subcomplex(output, members)
    return ColorlessTask(input_complex, output, delta)


@dataclass
class DecisionMap:
    """An order-preserving assignment from a round-n complex into the output."""

    level: int
    assignment: dict[Simplex, Simplex]

    def to_json_dict(self) -> dict:
        rows = []
        for sigma in sorted(self.assignment, key=Simplex.sort_key):
            image = self.assignment[sigma]
            rows.append(
                [
                    [label_text(v.label) for v in sigma],
                    [label_text(v.label) for v in image],
                ]
            )
        return {"round": self.level, "assignment": rows}


@dataclass(frozen=True)
class ProtocolModel:
    """Which stage construction the solver iterates.

    ``barycentric`` runs the chain subdivision directly on the task input.
    ``message`` runs a message adversary; in colorless mode on the input
    itself, in colored mode on the complex of all per-process value
    assignments spanning an input simplex, with the origin of a simplex
    taken up to forgetting processes.
    """

    kind: str = "message"
    family: str = IIS
    mode: str = COLORLESS
    d: int | None = None

    def __post_init__(self):
        if self.kind not in ("barycentric", "message"):
            raise ValidationError(f"unknown protocol kind {self.kind!r}")
        if self.kind == "message" and self.family not in FAMILIES:
            raise ValidationError(f"unknown adversary family {self.family!r}")
        if self.mode not in (COLORED, COLORLESS):
            raise ValidationError(f"unknown mode {self.mode!r}")

    def process_count_param(self, input_complex: Complex) -> int:
        return self.d if self.d is not None else input_complex.dim

    def build_stages(self, task_input: Complex, rounds: int) -> "ProtocolRun":
        if self.kind == "barycentric":
            stages = barycentric_stages(task_input, rounds)
            ground = {s: s for s in task_input}
            return ProtocolRun(stages, ground)
        d = self.process_count_param(task_input)
        adversary = Adversary(d, self.family)
        if self.mode == COLORLESS:
            stages = iterate(task_input, adversary, COLORLESS, rounds)
            ground = {s: s for s in task_input}
            return ProtocolRun(stages, ground)
        colored_input, ground = _colored_input_complex(task_input, d)
        stages = iterate(colored_input, adversary, COLORED, rounds)
        return ProtocolRun(stages, ground)


def _colored_input_complex(task_input: Complex, d: int) -> tuple[Complex, dict[Simplex, Simplex]]:
    """All assignments of input values to processes 0..d spanning an input simplex."""
    values = task_input.vertices
    facets = []
    for assignment in product(values, repeat=d + 1):
        if Simplex(assignment) in task_input:
            facets.append([(p, v.label) for p, v in enumerate(assignment)])
    if not facets:
        raise ValidationError("input complex has no global states for that many processes")
    colored = make_complex(facets)
    ground = {}
    for sigma in colored:
        ground[sigma] = Simplex(
            task_input.vertex_with_label(v.label[1]) for v in sigma
        )
    return colored, ground


@dataclass
class ProtocolRun:
    """Stages plus the origin map from level-0 simplices to task-input simplices."""

    stages: list[CarrierStage]
    ground: dict[Simplex, Simplex]

    def origin(self, level: int, sigma: Simplex) -> Simplex:
        return self.ground[project_to_level(self.stages, sigma, level, 0)]


def check_carried(
    decision: DecisionMap, task: ColorlessTask, run: ProtocolRun
) -> bool:
    """Re-validate a witness: total, order-preserving, and inside the specification."""
    if decision.level >= len(run.stages):
        raise DomainError(
            f"witness is for round {decision.level}, only {len(run.stages)} stages built"
        )
    level_complex = run.stages[decision.level].complex
    assignment = decision.assignment
    if set(assignment) != set(level_complex.simplices):
        return False
    for sigma, image in assignment.items():
        if image not in task.output:
            return False
        if image not in task.allowed(run.origin(decision.level, sigma)):
            return False
        for face_vertices in [sigma.verts[:i] + sigma.verts[i + 1 :] for i in range(len(sigma))]:
            if not face_vertices:
                continue
            if not assignment[Simplex(face_vertices)].issubset(image):
                return False
    return True


@dataclass
class SearchOutcome:
    status: str  # "found" | "not_found" | "timeout"
    witness: DecisionMap | None = None
    nodes: int = 0

    @property
    def found(self) -> bool:
        return self.status == "found"


class _Budget:
    """Wall-clock deadline shared across one search; checked coarsely."""

    __slots__ = ("deadline", "counter")

    def __init__(self, seconds: float | None):
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self.counter = 0

    def spent(self) -> bool:
        if self.deadline is None:
            return False
        self.counter += 1
        if self.counter % 256:
            return False
        return time.monotonic() > self.deadline


def _vertex_order(level_complex: Complex) -> list[Vertex]:
    """Variable order for the search: vertices in facet-major appearance order.

    Grouping by facet keeps constraints local: most simplices become fully
    assigned shortly after their last vertex, instead of after every vertex
    of the complex has been chosen.
    """
    order: list[Vertex] = []
    seen: set[Vertex] = set()
    for facet in level_complex.facets():
        for v in facet.verts:
            if v not in seen:
                seen.add(v)
                order.append(v)
    return order


def find_decision_map(
    task: ColorlessTask,
    run: ProtocolRun,
    level: int,
    mode: str = ORDER_PRESERVING,
    *,
    budget_seconds: float | None = None,
) -> SearchOutcome:
    """Search for a carried decision map at one round.

    Only vertices branch, over single output vertices, and every higher
    simplex is forced to the join of its vertices' images.  This is complete
    for both modes because specification images and the output complex are
    down-closed: given any monotone carried map, sending each vertex to the
    least vertex of its own image yields forward images that are faces of
    the original images, hence still output simplices and still allowed.
    So a monotone simplex-valued witness exists at a round exactly when a
    vertex-valued one does, and the search may range over the latter.

    A constraint on a simplex (its join must be an output simplex allowed
    for the simplex's origin) is checked as soon as its last vertex is
    assigned, and failures backjump to the most recent vertex actually
    involved in the conflict, so exhaustive negative answers do not thrash
    over unrelated choices.  Returns the first witness in the fixed
    deterministic order, or an explicit timeout distinct from a negative
    answer.
    """
    if mode not in SEARCH_MODES:
        raise ValidationError(f"search mode must be one of {SEARCH_MODES}")
    if level >= len(run.stages):
        raise DomainError(f"round {level} not built (have 0..{len(run.stages) - 1})")
    level_complex = run.stages[level].complex
    allowed = {
        sigma: task.allowed(run.origin(level, sigma)) for sigma in level_complex
    }
    budget = _Budget(budget_seconds)

    if not len(level_complex):
        return SearchOutcome("found", DecisionMap(level, {}), 0)

    order = _vertex_order(level_complex)
    idx_of = {v: i for i, v in enumerate(order)}
    n_vars = len(order)
    out_vertex = {v.id: v for v in task.output.vertices}
    output_sets = frozenset(
        frozenset(v.id for v in s) for s in task.output
    )

    def id_sets(sub: Subcomplex) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(v.id for v in g) for g in sub.generators)

    domains: list[tuple[frozenset[int], ...]] = []
    for v in order:
        members = [m for m in allowed[Simplex([v])].members() if m.dim == 0]
        domains.append(tuple(frozenset(u.id for u in m) for m in members))

    # Constraints, grouped by the last-assigned vertex of each simplex.
    checks: list[list[tuple[tuple[int, ...], tuple[frozenset[int], ...]]]] = [
        [] for _ in range(n_vars)
    ]
    for sigma in level_complex:
        if sigma.dim == 0:
            continue
        idxs = tuple(sorted(idx_of[v] for v in sigma.verts))
        checks[idxs[-1]].append((idxs, id_sets(allowed[sigma])))

    chosen: list[frozenset[int] | None] = [None] * n_vars
    nodes = 0

    class _OutOfBudget(Exception):
        pass

    def solve(i: int) -> set[int] | None:
        """Conflict-directed backjumping; None signals success below."""
        nonlocal nodes
        if i == n_vars:
            return None
        conflict: set[int] = set()
        for cand in domains[i]:
            if budget.spent():
                raise _OutOfBudget
            nodes += 1
            chosen[i] = cand
            violated = None
            for idxs, gen_sets in checks[i]:
                join = frozenset().union(*(chosen[j] for j in idxs))
                if join not in output_sets or not any(join <= g for g in gen_sets):
                    violated = idxs
                    break
            if violated is not None:
                conflict.update(j for j in violated if j != i)
                continue
            deeper = solve(i + 1)
            if deeper is None:
                return None
            if i not in deeper:
                chosen[i] = None
                return deeper
            deeper.discard(i)
            conflict.update(deeper)
        chosen[i] = None
        return conflict

    try:
        refuted = solve(0) is not None
    except _OutOfBudget:
        return SearchOutcome("timeout", None, nodes)
    if refuted:
        return SearchOutcome("not_found", None, nodes)

    vertex_image = {v: chosen[idx_of[v]] for v in order}
    assignment = {}
    for sigma in level_complex:
        ids = sorted(frozenset().union(*(vertex_image[v] for v in sigma.verts)))
        assignment[sigma] = Simplex(out_vertex[i] for i in ids)
    witness = DecisionMap(level, assignment)
    assert check_carried(witness, task, run)
    return SearchOutcome("found", witness, nodes)


@dataclass
class Verdict:
    """Outcome of the bounded-round solvability search."""

    solvable: bool
    round: int | None
    witness: DecisionMap | None
    searched_up_to: int

    CAVEAT = (
        "no witness up to the searched depth; this bounds the search, "
        "it is not an impossibility proof"
    )

    def describe(self) -> str:
        if self.solvable:
            return f"Solvable({self.round})"
        return f"NotSolvableUpTo({self.searched_up_to}) -- {self.CAVEAT}"


def solve_up_to(
    task: ColorlessTask,
    protocol: ProtocolModel,
    max_rounds: int,
    mode: str = ORDER_PRESERVING,
    *,
    budget_seconds: float | None = None,
) -> Verdict:
    """Search rounds 0..max_rounds in order; first witness wins.

    Raises a timeout carrying the deepest exhaustively searched round when
    the budget runs out mid-way.
    """
    if max_rounds < 0:
        raise ValidationError("round bound must be >= 0")
    run = protocol.build_stages(task.input, max_rounds)
    for n in range(max_rounds + 1):
        outcome = find_decision_map(task, run, n, mode, budget_seconds=budget_seconds)
        if outcome.status == "timeout":
            raise SearchTimeout(n - 1)
        if outcome.found:
            return Verdict(True, n, outcome.witness, n)
    return Verdict(False, None, None, max_rounds)
