"""Simplicial complexes represented as face posets.

A complex is a finite family of non-empty vertex sets closed under taking
non-empty subsets.  Ordered by inclusion, the family is a finite poset and
hence a finite T0 space (up-sets open, down-sets closed); everything else in
this package is phrased against that view: subcomplexes are down-sets,
simplicial maps are vertex maps whose forward image preserves simplices, and
carrier maps send simplices to down-sets of another complex.

Vertices carry an opaque payload (the ``label``) plus a canonical integer id
assigned when the complex is built.  Subdivision and protocol vertices are
labelled by structures over the previous level (sets of vertices, chains of
simplices), so interning payloads into plain ids keeps every level uniform
and keeps iteration order reproducible across runs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Hashable, Iterable, Iterator, Mapping

from .errors import DomainError, ResourceLimitError, ValidationError

DEFAULT_MAX_SIMPLICES = 10**6
MAX_SIMPLICES_ENV = "SPECTRA_MAX_SIMPLICES"


def simplex_budget(explicit: int | None = None) -> int:
    """Resolve the size guard: explicit argument, else env override, else default."""
    if explicit is not None:
        return explicit
    env = os.environ.get(MAX_SIMPLICES_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"{MAX_SIMPLICES_ENV} must be an integer: {env!r}") from exc
    return DEFAULT_MAX_SIMPLICES


def canonical_key(label: Any):
    """Deterministic sort key for vertex payloads.

    Payloads are heterogeneous (input values, view sets, chains), so keys are
    nested ``(type-tag, ...)`` tuples: comparisons never cross types and are
    stable across runs, unlike ``hash``.
    """
    if isinstance(label, Vertex):
        return ("vertex", label.id, canonical_key(label.label))
    if isinstance(label, Simplex):
        return ("simplex", tuple(canonical_key(v) for v in label))
    if isinstance(label, bool):
        return ("bool", label)
    if isinstance(label, int):
        return ("int", label)
    if isinstance(label, str):
        return ("str", label)
    if isinstance(label, tuple):
        return ("tuple", tuple(canonical_key(x) for x in label))
    if isinstance(label, (set, frozenset)):
        return ("set", tuple(sorted(canonical_key(x) for x in label)))
    if label is None:
        return ("none",)
    raise ValidationError(f"unsupported vertex label type: {type(label).__name__}")


def label_text(label: Any) -> str:
    """Render a payload as a short deterministic string (JSON/DOT labels)."""
    if isinstance(label, Vertex):
        return label_text(label.label)
    if isinstance(label, Simplex):
        return "{" + ",".join(label_text(v) for v in label) + "}"
    if isinstance(label, (set, frozenset)):
        parts = sorted(label, key=canonical_key)
        return "{" + ",".join(label_text(x) for x in parts) + "}"
    if isinstance(label, tuple):
        return "(" + ",".join(label_text(x) for x in label) + ")"
    return str(label)


class Vertex:
    """A vertex: canonical id within its complex plus an opaque payload."""

    __slots__ = ("id", "label", "_hash")

    def __init__(self, vid: int, label: Hashable = None):
        self.id = vid
        self.label = label
        self._hash = hash((vid, label))

    def __eq__(self, other):
        return (
            isinstance(other, Vertex)
            and self.id == other.id
            and self.label == other.label
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Vertex"):
        return self.id < other.id

    def __repr__(self):
        return f"Vertex({self.id}, {label_text(self.label)})"


class Simplex:
    """A non-empty set of vertices, stored as an id-sorted tuple.

    Set operations (subset, union, intersection) compare vertices by id and
    therefore only make sense within a single vertex universe, which is how
    every caller uses them: a simplex belongs to one complex or to carrier
    images inside one complex.
    """

    __slots__ = ("verts", "ids", "_hash")

    def __init__(self, vertices: Iterable[Vertex]):
        seen: dict[int, Vertex] = {}
        for v in vertices:
            if not isinstance(v, Vertex):
                raise ValidationError(f"simplex vertices must be Vertex, got {type(v).__name__}")
            seen[v.id] = v
        if not seen:
            raise ValidationError("the empty simplex is not allowed")
        self.verts = tuple(seen[i] for i in sorted(seen))
        self.ids = frozenset(seen)
        self._hash = hash(self.verts)

    @property
    def dim(self) -> int:
        return len(self.verts) - 1

    def __len__(self):
        return len(self.verts)

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self.verts)

    def __contains__(self, v: Vertex):
        return v.id in self.ids

    def __eq__(self, other):
        return isinstance(other, Simplex) and self.verts == other.verts

    def __hash__(self):
        return self._hash

    def sort_key(self):
        """Canonical order: dimension first, then vertex ids."""
        return (len(self.verts), tuple(v.id for v in self.verts))

    def issubset(self, other: "Simplex") -> bool:
        return self.ids <= other.ids

    def union(self, other: "Simplex") -> "Simplex":
        return Simplex(self.verts + other.verts)

    def intersection(self, other: "Simplex") -> "Simplex | None":
        common = [v for v in self.verts if v.id in other.ids]
        return Simplex(common) if common else None

    def faces(self, *, proper: bool = True) -> Iterator["Simplex"]:
        """All non-empty subsets, smallest first; excludes self when proper."""
        top = len(self.verts) if proper else len(self.verts) + 1
        for k in range(1, top):
            for combo in combinations(self.verts, k):
                yield Simplex(combo)

    def __repr__(self):
        return "{" + ",".join(label_text(v.label) for v in self.verts) + "}"


def _maximal(simplices: Iterable[Simplex]) -> tuple[Simplex, ...]:
    items = sorted(set(simplices), key=Simplex.sort_key)
    out = []
    for i, s in enumerate(items):
        if not any(s is not t and s.issubset(t) for t in items):
            out.append(s)
    return tuple(out)


class Complex:
    """A downward-closed family of simplices with canonical iteration order."""

    __slots__ = ("simplices", "_sorted", "vertices", "_facets", "_label_index")

    def __init__(
        self,
        simplices: Iterable[Simplex],
        *,
        assume_closed: bool = False,
        max_simplices: int | None = None,
    ):
        budget = simplex_budget(max_simplices)
        if assume_closed:
            family = set(simplices)
            if len(family) > budget:
                raise ResourceLimitError(
                    f"complex would have {len(family)} simplices, budget is {budget}"
                )
        else:
            family = set()
            for s in simplices:
                if s in family:
                    continue
                for face in s.faces(proper=False):
                    family.add(face)
                    if len(family) > budget:
                        raise ResourceLimitError(
                            f"downward closure exceeds the simplex budget of {budget}"
                        )
        self.simplices = frozenset(family)
        self._sorted = tuple(sorted(family, key=Simplex.sort_key))
        verts: dict[int, Vertex] = {}
        for s in self._sorted:
            for v in s:
                verts[v.id] = v
        self.vertices = tuple(verts[i] for i in sorted(verts))
        # In a down-closed family a non-maximal simplex is a codimension-1
        # face of some member, so facets are whatever is never such a face.
        covered = {
            Simplex(combo)
            for s in family
            if s.dim > 0
            for combo in combinations(s.verts, len(s.verts) - 1)
        }
        self._facets = tuple(s for s in self._sorted if s not in covered)
        self._label_index = None

    # -- basic queries ------------------------------------------------------

    def __len__(self):
        return len(self.simplices)

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self._sorted)

    def __contains__(self, s: Simplex):
        return s in self.simplices

    def __eq__(self, other):
        return isinstance(other, Complex) and self.simplices == other.simplices

    def __hash__(self):
        return hash(self.simplices)

    @property
    def dim(self) -> int:
        return max((s.dim for s in self._facets), default=-1)

    def facets(self) -> tuple[Simplex, ...]:
        """The inclusion-maximal simplices; their closure reproduces the complex."""
        return self._facets

    def up_set(self, sigma: Simplex) -> tuple[Simplex, ...]:
        """All simplices containing ``sigma``, in canonical order."""
        if sigma not in self.simplices:
            raise DomainError(f"simplex {sigma!r} is not in the complex")
        return tuple(t for t in self._sorted if sigma.issubset(t))

    def closed_star(self, sigma: Simplex) -> "Subcomplex":
        """Downward closure of the up-set of ``sigma``."""
        if sigma not in self.simplices:
            raise DomainError(f"simplex {sigma!r} is not in the complex")
        gens = [f for f in self._facets if sigma.issubset(f)]
        return Subcomplex(self, gens)

    def skeleton(self, k: int) -> "Complex":
        """Subcomplex of simplices of dimension at most ``k``, as a complex."""
        return Complex(
            (s for s in self._sorted if s.dim <= k), assume_closed=True
        )

    def vertex_with_label(self, label: Hashable) -> Vertex:
        if self._label_index is None:
            self._label_index = {v.label: v for v in self.vertices}
        try:
            return self._label_index[label]
        except KeyError:
            raise DomainError(f"no vertex labelled {label_text(label)!r}") from None

    def simplex(self, *labels: Hashable) -> Simplex:
        """Convenience: the simplex spanned by the vertices with these labels."""
        return Simplex(self.vertex_with_label(l) for l in labels)

    def __repr__(self):
        return f"Complex({len(self.simplices)} simplices, {len(self.vertices)} vertices)"


def intern_labels(labels: Iterable[Hashable]) -> dict[Hashable, Vertex]:
    """Assign canonical integer ids to payloads (sorted by ``canonical_key``)."""
    ordered = sorted(set(labels), key=canonical_key)
    return {lab: Vertex(i, lab) for i, lab in enumerate(ordered)}


def make_complex(
    generators: Iterable[Iterable[Hashable]],
    *,
    max_simplices: int | None = None,
) -> Complex:
    """Build the smallest complex containing the generator label sets.

    Labels are interned into vertices with canonical ids; the result is the
    downward closure of the generators.  An empty generator set yields the
    empty complex; an empty generator is rejected.
    """
    gen_sets = [frozenset(g) for g in generators]
    if any(not g for g in gen_sets):
        raise ValidationError("generators must be non-empty vertex sets")
    universe = intern_labels(lab for g in gen_sets for lab in g)
    return Complex(
        (Simplex(universe[lab] for lab in g) for g in gen_sets),
        max_simplices=max_simplices,
    )


def standard_simplex(d: int, labels: Iterable[Hashable] | None = None) -> Complex:
    """The full simplex on ``d + 1`` vertices (labels default to v0..vd)."""
    if d < 0:
        raise ValidationError("dimension must be non-negative")
    labs = list(labels) if labels is not None else [f"v{i}" for i in range(d + 1)]
    if len(labs) != d + 1:
        raise ValidationError(f"expected {d + 1} labels, got {len(labs)}")
    return make_complex([labs])


class Subcomplex:
    """A down-set of a parent complex, stored by its maximal generators."""

    __slots__ = ("parent", "generators", "_members")

    def __init__(self, parent: Complex, generators: Iterable[Simplex]):
        gens = _maximal(generators)
        for g in gens:
            if g not in parent:
                raise ValidationError(f"generator {g!r} is not a simplex of the parent")
        self.parent = parent
        self.generators = gens
        self._members = None

    @classmethod
    def whole(cls, parent: Complex) -> "Subcomplex":
        return cls(parent, parent.facets())

    @classmethod
    def empty(cls, parent: Complex) -> "Subcomplex":
        return cls(parent, ())

    @property
    def is_empty(self) -> bool:
        return not self.generators

    @property
    def dim(self) -> int:
        return max((g.dim for g in self.generators), default=-1)

    def __contains__(self, s: Simplex) -> bool:
        return any(s.issubset(g) for g in self.generators)

    def members(self) -> tuple[Simplex, ...]:
        """Materialize the down-set in canonical order."""
        if self._members is None:
            out = set()
            for g in self.generators:
                out.update(g.faces(proper=False))
            self._members = tuple(sorted(out, key=Simplex.sort_key))
        return self._members

    def member_set(self) -> frozenset[Simplex]:
        return frozenset(self.members())

    def issubset(self, other: "Subcomplex") -> bool:
        return all(g in other for g in self.generators)

    def __eq__(self, other):
        return (
            isinstance(other, Subcomplex)
            and self.parent is other.parent
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((id(self.parent), self.generators))

    def union(self, other: "Subcomplex") -> "Subcomplex":
        self._check_same_parent(other)
        return Subcomplex(self.parent, self.generators + other.generators)

    def intersection(self, other: "Subcomplex") -> "Subcomplex":
        self._check_same_parent(other)
        meets = []
        for a in self.generators:
            for b in other.generators:
                m = a.intersection(b)
                if m is not None:
                    meets.append(m)
        return Subcomplex(self.parent, meets)

    def _check_same_parent(self, other: "Subcomplex"):
        if self.parent is not other.parent:
            raise DomainError("subcomplexes live in different parent complexes")

    def __repr__(self):
        return f"Subcomplex({list(self.generators)!r})"


# -- map validation ----------------------------------------------------------


@dataclass(frozen=True)
class SimplicialMapReport:
    is_simplicial: bool
    is_rigid: bool


def check_simplicial_map(
    f: Mapping[Vertex, Vertex], source: Complex, target: Complex
) -> SimplicialMapReport:
    """Report whether a vertex map carries simplices to simplices, rigidly.

    ``is_simplicial`` holds when every forward image is a simplex of the
    target; ``is_rigid`` additionally requires images to keep the dimension.
    """
    missing = [v for v in source.vertices if v not in f]
    if missing:
        raise ValidationError(f"vertex map is not total; missing {missing[0]!r}")
    rigid = True
    for s in source:
        image = Simplex(f[v] for v in s)
        if image not in target:
            return SimplicialMapReport(False, False)
        if len(image) != len(s):
            rigid = False
    return SimplicialMapReport(True, rigid)


@dataclass(frozen=True)
class CarrierReport:
    monotone: bool
    strict: bool
    rigid: bool
    total: bool

    @property
    def ok(self) -> bool:
        return self.monotone and self.strict and self.total


def check_carrier_map(
    phi: Mapping[Simplex, Subcomplex], source: Complex, target: Complex
) -> CarrierReport:
    """Report monotonicity, strictness, rigidity and totality of a carrier map.

    Monotone: images grow along faces.  Strict: the image of an intersection
    is the intersection of the images (when the intersection is non-empty).
    Rigid: images keep dimension.  Total: the images jointly cover the whole
    target.  Empty images are rejected outright; a total rigid carrier can
    never produce one, so an empty image always signals a construction bug.
    """
    for s in source:
        if s not in phi:
            raise ValidationError(f"carrier map is not defined on {s!r}")
        img = phi[s]
        if not isinstance(img, Subcomplex) or img.parent is not target:
            raise ValidationError(f"image of {s!r} is not a down-set of the target")
        if img.is_empty:
            raise ValidationError(f"carrier image of {s!r} is empty")

    elems = list(source)
    monotone = True
    strict = True
    rigid = True
    for i, s in enumerate(elems):
        if phi[s].dim != s.dim:
            rigid = False
        for t in elems:
            if s is not t and s.issubset(t) and not phi[s].issubset(phi[t]):
                monotone = False
        for t in elems[i + 1 :]:
            m = s.intersection(t)
            if m is None:
                continue
            expected = phi[s].intersection(phi[t])
            got = phi[m]
            if not (expected.issubset(got) and got.issubset(expected)):
                strict = False

    covered = set()
    for s in source:
        covered.update(phi[s].members())
    total = covered == set(target.simplices)
    return CarrierReport(monotone, strict, rigid, total)


# -- serialization -----------------------------------------------------------


def complex_to_json_dict(c: Complex) -> dict:
    return {
        "vertices": [{"id": v.id, "label": label_text(v.label)} for v in c.vertices],
        "facets": [[v.id for v in f] for f in c.facets()],
    }


def complex_to_json(c: Complex) -> str:
    return json.dumps(complex_to_json_dict(c), indent=2) + "\n"


def complex_from_json_dict(data: dict) -> Complex:
    try:
        vert_entries = data["vertices"]
        facet_entries = data["facets"]
    except (KeyError, TypeError) as exc:
        raise ValidationError("complex JSON needs 'vertices' and 'facets'") from exc
    verts: dict[int, Vertex] = {}
    for entry in vert_entries:
        vid, lab = int(entry["id"]), str(entry["label"])
        if vid in verts:
            raise ValidationError(f"duplicate vertex id {vid}")
        verts[vid] = Vertex(vid, lab)
    simplices = []
    for facet in facet_entries:
        try:
            simplices.append(Simplex(verts[int(i)] for i in facet))
        except KeyError as exc:
            raise ValidationError(f"facet refers to unknown vertex id {exc}") from None
    return Complex(simplices)


def complex_from_json(text: str) -> Complex:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from exc
    return complex_from_json_dict(data)


def complex_to_dot(c: Complex, graph_name: str = "face_poset") -> str:
    """DOT rendering of the face poset's Hasse diagram (covering arcs only)."""
    index = {s: i for i, s in enumerate(c)}
    lines = [f"digraph {graph_name} {{", "  rankdir=BT;"]
    for s, i in index.items():
        text = ",".join(label_text(v.label) for v in s)
        lines.append(f'  s{i} [label="{{{text}}}"];')
    for s in c:
        if s.dim == 0:
            continue
        for face in combinations(s.verts, len(s.verts) - 1):
            lines.append(f"  s{index[Simplex(face)]} -> s{index[s]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
