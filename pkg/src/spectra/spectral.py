"""Depth-N truncations of the limit space of a protocol.

A point of the truncated space is a protocol sequence: one simplex per
level, each projecting onto the previous one.  Because the projections are
functions, a depth-N sequence is determined by its level-N entry, so the
truncated space is in bijection with the level-N complex; the sequence view
is still what the specialization order, the basis opens, and the point
classification are phrased against, so sequences are materialized
explicitly and re-verified.

All geometry is exact: points are rational barycentric coordinates over the
input simplex, and membership of a point in a realized simplex is decided
by solving the coordinate system over fractions.  The class of a point
(how many sequences sit below it) is brittle under floating point, since
whether a coordinate is a dyadic rational changes the answer, so no floats
appear anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .complexes import Simplex, Vertex
from .errors import DomainError, ResourceLimitError, ValidationError
from .protocol import CarrierStage

DEFAULT_MAX_SEQUENCES = 10**6


@dataclass(frozen=True)
class ProtocolSequence:
    """A compatible sequence of simplices, one per level 0..N."""

    entries: tuple[Simplex, ...]

    @property
    def depth(self) -> int:
        return len(self.entries) - 1

    def at_level(self, n: int) -> Simplex:
        return self.entries[n]

    def sort_key(self):
        return tuple(s.sort_key() for s in self.entries)


def is_compatible(seq: ProtocolSequence, stages: Sequence[CarrierStage]) -> bool:
    """Does every entry project onto the previous one?"""
    if seq.depth >= len(stages):
        return False
    for n, sigma in enumerate(seq.entries):
        if sigma not in stages[n].complex:
            return False
        if n > 0 and stages[n].project(sigma) != seq.entries[n - 1]:
            return False
    return True


def enumerate_sequences(
    stages: Sequence[CarrierStage],
    *,
    facets_only: bool = False,
    max_sequences: int = DEFAULT_MAX_SEQUENCES,
) -> tuple[ProtocolSequence, ...]:
    """All depth-N compatible sequences, canonically ordered.

    Each level-N simplex extends backwards uniquely along the projections,
    so there is exactly one sequence per level-N simplex (per level-N facet
    when restricted to facets: projections send facets onto facets).
    """
    top = stages[-1]
    seeds = top.complex.facets() if facets_only else tuple(top.complex)
    if len(seeds) > max_sequences:
        raise ResourceLimitError(
            f"{len(seeds)} sequences exceed the bound of {max_sequences}"
        )
    out = []
    for seed in seeds:
        entries = [seed]
        for level in range(len(stages) - 1, 0, -1):
            entries.append(stages[level].project(entries[-1]))
        seq = ProtocolSequence(tuple(reversed(entries)))
        if facets_only and any(
            s not in stages[n].complex.facets() for n, s in enumerate(seq.entries)
        ):
            continue
        assert is_compatible(seq, stages)
        out.append(seq)
    return tuple(sorted(out, key=ProtocolSequence.sort_key))


def specialization_leq(s: ProtocolSequence, t: ProtocolSequence) -> bool:
    """Specialization order: s below t iff s is point-wise above t.

    A sequence of larger simplices is less specialized: it closes over the
    more specific one, mirroring closure in the level complexes.
    """
    if s.depth != t.depth:
        raise DomainError(f"depth mismatch: {s.depth} vs {t.depth}")
    return all(tn.issubset(sn) for sn, tn in zip(s.entries, t.entries))


def basis_open(
    stages: Sequence[CarrierStage], level: int, v: Vertex
) -> tuple[ProtocolSequence, ...]:
    """The basic open set of a level vertex: sequences whose level entry contains it.

    These sets are closed under going up in the point-wise order, which is
    down in the specialization order: refining an execution never drops a
    vertex already seen at this level.
    """
    if not (0 <= level < len(stages)):
        raise DomainError(f"level {level} outside 0..{len(stages) - 1}")
    if v not in set(stages[level].complex.vertices):
        raise DomainError(f"{v!r} is not a vertex of level {level}")
    return tuple(
        seq
        for seq in enumerate_sequences(stages)
        if v in seq.at_level(level)
    )


# -- exact geometry over the standard simplex --------------------------------


class RationalPoint:
    """Exact barycentric coordinates over the input simplex's vertices."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable[Fraction | int | str]):
        vals = []
        for c in coords:
            if isinstance(c, float):
                raise ValidationError("coordinates must be exact rationals, not floats")
            vals.append(Fraction(c))
        if not vals:
            raise ValidationError("a point needs at least one coordinate")
        if any(c < 0 for c in vals):
            raise ValidationError("coordinates must be non-negative")
        if sum(vals) != 1:
            raise ValidationError(f"coordinates must sum to 1, got {sum(vals)}")
        self.coords = tuple(vals)

    @classmethod
    def parse(cls, text: str) -> "RationalPoint":
        return cls(part.strip() for part in text.split(","))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def on_boundary(self) -> bool:
        return any(c == 0 for c in self.coords)

    def __eq__(self, other):
        return isinstance(other, RationalPoint) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def _check_subdivision_stages(stages: Sequence[CarrierStage]):
    top_facets = stages[0].complex.facets()
    if len(top_facets) != 1 or len(top_facets[0]) != len(stages[0].complex.vertices):
        raise ValidationError("geometry requires the input to be a standard simplex")
    for stage in stages[1:]:
        if stage.kind != "chain":
            raise ValidationError("geometry requires chain-subdivision stages")


def vertex_coordinates(
    stages: Sequence[CarrierStage], level: int
) -> dict[Vertex, tuple[Fraction, ...]]:
    """Barycentric coordinates of every level vertex over the input corners.

    Subdivision vertices are labelled by previous-level simplices; each one
    sits at the exact barycenter of its label.
    """
    _check_subdivision_stages(stages[: level + 1])
    corners = stages[0].complex.vertices
    coords: dict[Vertex, tuple[Fraction, ...]] = {
        v: tuple(Fraction(int(v == u)) for u in corners) for v in corners
    }
    for stage in stages[1 : level + 1]:
        nxt = {}
        for v in stage.complex.vertices:
            prev_simplex: Simplex = stage.labels[v]
            k = len(prev_simplex)
            nxt[v] = tuple(
                sum(coords[u][i] for u in prev_simplex) / k
                for i in range(len(corners))
            )
        coords = nxt
    return coords


def barycentric_in_simplex(
    point: Sequence[Fraction], vertex_coords: Sequence[tuple[Fraction, ...]]
) -> tuple[Fraction, ...] | None:
    """Solve point = sum(weights * vertices) exactly; None if outside the span.

    Returns the weights when they exist, are unique, and are non-negative;
    weights sum to 1 automatically because every column does.
    """
    m = len(point)
    k = len(vertex_coords)
    rows = [[vertex_coords[j][i] for j in range(k)] + [point[i]] for i in range(m)]
    pivot_col_of_row = []
    r = 0
    for col in range(k):
        pivot = next((i for i in range(r, m) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivot_col_of_row.append(col)
        r += 1
    for i in range(r, m):
        if rows[i][k] != 0:
            return None
    if r < k:
        return None
    weights = [Fraction(0)] * k
    for row, col in enumerate(pivot_col_of_row):
        weights[col] = rows[row][k]
    if any(w < 0 for w in weights):
        return None
    return tuple(weights)


def carrier_of_point(
    x: RationalPoint, stages: Sequence[CarrierStage]
) -> ProtocolSequence:
    """The sequence of support-minimal simplices whose realizations contain x.

    Level by level, the candidates are the members of the previous carrier
    image, and the accepted one is the simplex holding x with all-positive
    weights; realized relative interiors partition the realization, so it
    is unique.
    """
    _check_subdivision_stages(stages)
    corners = stages[0].complex.vertices
    if len(x.coords) != len(corners):
        raise DomainError(
            f"point has {len(x.coords)} coordinates, input simplex has {len(corners)} corners"
        )
    support = [v for v, c in zip(corners, x.coords) if c != 0]
    entries = [Simplex(support)]
    coords: dict[Vertex, tuple[Fraction, ...]] = {
        v: tuple(Fraction(int(v == u)) for u in corners) for v in corners
    }
    for level in range(1, len(stages)):
        stage = stages[level]
        coords = {
            v: tuple(
                sum(coords[u][i] for u in stage.labels[v]) / len(stage.labels[v])
                for i in range(len(corners))
            )
            for v in stage.complex.vertices
        }
        found = None
        for cand in stage.carrier_of(entries[-1]).members():
            weights = barycentric_in_simplex(x.coords, [coords[v] for v in cand])
            if weights is not None and all(w > 0 for w in weights):
                found = cand
                break
        if found is None:
            raise DomainError(f"point {x!r} has no carrier at level {level}")
        entries.append(found)
    seq = ProtocolSequence(tuple(entries))
    assert is_compatible(seq, stages)
    return seq


def downset_count(x: RationalPoint, stages: Sequence[CarrierStage]) -> int:
    """How many depth-N sequences dominate the carrier sequence of x level-wise.

    This counts the truncated down-set of x under specialization: x itself
    plus every less-specialized sequence closing over it.
    """
    carrier = carrier_of_point(x, stages)
    count = 0
    for seq in enumerate_sequences(stages):
        if all(
            carrier.at_level(n).issubset(seq.at_level(n))
            for n in range(len(stages))
        ):
            count += 1
    return count


class PointClass(Enum):
    C1 = "C1"
    C3_INTERIOR = "C3_interior"
    C3_BOUNDARY = "C3_boundary"
    C_INFINITY = "C_infinity"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class Classification:
    kind: PointClass
    codims: tuple[int, ...]
    depth: int
    window: int


def classify_point(
    x: RationalPoint, stages: Sequence[CarrierStage], window: int = 3
) -> Classification:
    """Classify x by the codimension profile of its carrier sequence.

    Codimension 0 at every level means the point stays interior to facets
    forever seen so far; constant codimension 1 over the trailing window
    pins the two-sided (or one-sided, on the boundary) wall case; trailing
    codimension >= 2 is the infinite-width case.  Anything else is reported
    unstable at this depth: truncations certify only stabilized patterns,
    so no limit class is guessed.
    """
    depth = len(stages) - 1
    if not (2 <= window <= depth):
        raise DomainError(f"need depth >= window >= 2, got depth={depth}, window={window}")
    d = stages[0].complex.dim
    carrier = carrier_of_point(x, stages)
    codims = tuple(d - s.dim for s in carrier.entries)
    tail = codims[-window:]
    if all(c == 0 for c in codims):
        kind = PointClass.C1
    elif all(c == 1 for c in tail):
        kind = PointClass.C3_BOUNDARY if x.on_boundary() else PointClass.C3_INTERIOR
    elif all(c >= 2 for c in tail):
        kind = PointClass.C_INFINITY
    else:
        kind = PointClass.UNSTABLE
    return Classification(kind, codims, depth, window)


def squared_mesh(stages: Sequence[CarrierStage], level: int) -> Fraction:
    """Largest squared edge length over the facets of a level, exactly.

    Realizes the input as the regular unit-side simplex; for points given
    barycentrically the squared distance is half the sum of squared
    coordinate differences.
    """
    coords = vertex_coordinates(stages, level)
    worst = Fraction(0)
    for facet in stages[level].complex.facets():
        verts = facet.verts
        for i in range(len(verts)):
            for j in range(i + 1, len(verts)):
                delta = [a - b for a, b in zip(coords[verts[i]], coords[verts[j]])]
                dist2 = sum(x * x for x in delta) / 2
                if dist2 > worst:
                    worst = dist2
    return worst
