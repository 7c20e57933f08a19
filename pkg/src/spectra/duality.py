"""Finite Birkhoff duality.

Finite distributive lattices are, up to isomorphism, down-set lattices of
finite posets; the poset is recovered as the join-irreducible elements.  The
operations here realize both directions for the sizes this package needs,
lift carrier maps to lattice homomorphisms between down-set lattices, and
recover the order-preserving map dual to a protocol-round carrier.

Lattices are materialized only for property checks: the dual projection of a
carrier is computed directly from carriers (per element of the target), which
costs polynomial time where the explicit down-set lattice is exponential.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Hashable, Iterable, Mapping

from .complexes import Complex, Simplex, Subcomplex, canonical_key
from .errors import CarrierAxiomError, ResourceLimitError, ValidationError

DEFAULT_POSET_BOUND = 20


class Poset:
    """A finite poset: canonical element order plus principal down-sets."""

    __slots__ = ("elements", "_down")

    def __init__(self, elements: Iterable[Hashable], leq: Callable[[Hashable, Hashable], bool]):
        self.elements = tuple(sorted(set(elements), key=canonical_key))
        down: dict[Hashable, frozenset] = {}
        for b in self.elements:
            down[b] = frozenset(a for a in self.elements if leq(a, b))
        self._down = down
        self._validate()

    def _validate(self):
        for a in self.elements:
            if a not in self._down[a]:
                raise ValidationError(f"order is not reflexive at {a!r}")
        for a in self.elements:
            for b in self._down[a]:
                if a in self._down[b] and a != b:
                    raise ValidationError(f"order is not antisymmetric on {a!r}, {b!r}")
                if not self._down[b] <= self._down[a]:
                    raise ValidationError("order is not transitive")

    @classmethod
    def from_pairs(cls, elements: Iterable[Hashable], pairs: Iterable[tuple]) -> "Poset":
        """Build from a relation, taking the reflexive-transitive closure."""
        els = list(set(elements))
        rel = {(a, a) for a in els}
        rel.update(pairs)
        changed = True
        while changed:
            changed = False
            for (a, b) in list(rel):
                for (c, d) in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        related = set(rel)
        return cls(els, lambda a, b: (a, b) in related)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leq(self, a, b) -> bool:
        return a in self._down[b]

    def down_set(self, a) -> frozenset:
        return self._down[a]

    def is_down_set(self, subset: frozenset) -> bool:
        return all(self._down[a] <= subset for a in subset)

    def covers(self, b) -> tuple:
        """Elements covered by ``b`` (maximal among those strictly below)."""
        below = [a for a in self._down[b] if a != b]
        return tuple(
            a for a in below
            if not any(a in self._down[c] and a != c and c != b for c in below)
        )

    def maximal(self) -> tuple:
        return tuple(
            a for a in self.elements
            if not any(a in self._down[b] and a != b for b in self.elements)
        )


def face_poset(c: Complex) -> Poset:
    """The simplices of a complex ordered by inclusion."""
    return Poset(c, lambda a, b: a.issubset(b))


class FiniteLattice:
    """A finite lattice given by elements, order, and join/meet operations."""

    __slots__ = ("elements", "_leq", "_join", "_meet", "_distributive")

    def __init__(
        self,
        elements: Iterable[Hashable],
        leq: Callable,
        join: Callable | None = None,
        meet: Callable | None = None,
        distributive: bool | None = None,
    ):
        self.elements = tuple(sorted(set(elements), key=canonical_key))
        self._leq = leq
        self._join = join
        self._meet = meet
        self._distributive = distributive
        if join is None or meet is None:
            self._compute_tables()

    def _compute_tables(self):
        els = self.elements
        joins: dict[tuple, Hashable] = {}
        meets: dict[tuple, Hashable] = {}
        for a in els:
            for b in els:
                uppers = [c for c in els if self._leq(a, c) and self._leq(b, c)]
                least = [c for c in uppers if all(self._leq(c, d) for d in uppers)]
                lowers = [c for c in els if self._leq(c, a) and self._leq(c, b)]
                greatest = [c for c in lowers if all(self._leq(d, c) for d in lowers)]
                if len(least) != 1 or len(greatest) != 1:
                    raise ValidationError(f"not a lattice: no join/meet for {a!r}, {b!r}")
                joins[(a, b)] = least[0]
                meets[(a, b)] = greatest[0]
        self._join = lambda a, b: joins[(a, b)]
        self._meet = lambda a, b: meets[(a, b)]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leq(self, a, b) -> bool:
        return self._leq(a, b)

    def join(self, a, b):
        return self._join(a, b)

    def meet(self, a, b):
        return self._meet(a, b)

    @property
    def bottom(self):
        for a in self.elements:
            if all(self._leq(a, b) for b in self.elements):
                return a
        raise ValidationError("lattice has no bottom")

    @property
    def top(self):
        for a in self.elements:
            if all(self._leq(b, a) for b in self.elements):
                return a
        raise ValidationError("lattice has no top")

    def is_distributive(self) -> bool:
        if self._distributive is not None:
            return self._distributive
        for a in self.elements:
            for b in self.elements:
                for c in self.elements:
                    lhs = self.meet(a, self.join(b, c))
                    rhs = self.join(self.meet(a, b), self.meet(a, c))
                    if lhs != rhs:
                        self._distributive = False
                        return False
        self._distributive = True
        return True

    def lower_covers(self, a) -> tuple:
        below = [b for b in self.elements if self._leq(b, a) and b != a]
        return tuple(
            b for b in below
            if not any(self._leq(b, c) and b != c and c != a for c in below)
        )

    def as_poset(self) -> Poset:
        return Poset(self.elements, self._leq)


def downset_lattice(p: Poset, *, bound: int = DEFAULT_POSET_BOUND) -> FiniteLattice:
    """The lattice of down-sets of a poset (join = union, meet = intersection).

    The lattice is exponential in the poset, so the poset size is guarded.
    """
    if len(p) > bound:
        raise ResourceLimitError(f"poset has {len(p)} elements, bound is {bound}")
    # Decide membership element by element along a linear extension; an
    # element may join only once its strict lower set is in.  Each leaf of
    # the binary recursion is a distinct down-set.
    order = sorted(p.elements, key=lambda a: (len(p.down_set(a)), canonical_key(a)))
    ideals: list[frozenset] = []

    def extend(i: int, current: frozenset):
        if i == len(order):
            ideals.append(current)
            return
        extend(i + 1, current)
        m = order[i]
        if p.down_set(m) - {m} <= current:
            extend(i + 1, current | {m})

    extend(0, frozenset())
    return FiniteLattice(
        ideals,
        lambda a, b: a <= b,
        join=lambda a, b: a | b,
        meet=lambda a, b: a & b,
        distributive=True,
    )


def join_irreducibles(lattice: FiniteLattice) -> Poset:
    """The induced subposet of join-irreducible elements.

    For the down-set lattice of a poset P this is order-isomorphic to P.
    Requires distributivity (checked), since only then is the result a
    faithful dual.
    """
    if not lattice.is_distributive():
        raise ValidationError("lattice is not distributive")
    bottom = lattice.bottom
    ji = [
        a
        for a in lattice.elements
        if a != bottom and len(lattice.lower_covers(a)) == 1
    ]
    return Poset(ji, lattice.leq)


@dataclass(frozen=True)
class LatticeHom:
    """A bounded-lattice homomorphism given by an explicit assignment."""

    source: FiniteLattice
    target: FiniteLattice
    assignment: Mapping

    def __call__(self, a):
        return self.assignment[a]

    def check(self) -> tuple[str, ...]:
        """Return the names of violated homomorphism axioms (empty if none)."""
        failures = []
        f = self.assignment
        if f[self.source.bottom] != self.target.bottom:
            failures.append("bottom")
        if f[self.source.top] != self.target.top:
            failures.append("top")
        for a, b in combinations(self.source.elements, 2):
            if f[self.source.join(a, b)] != self.target.join(f[a], f[b]):
                failures.append("join-preservation")
                break
        for a, b in combinations(self.source.elements, 2):
            if f[self.source.meet(a, b)] != self.target.meet(f[a], f[b]):
                failures.append("meet-preservation")
                break
        return tuple(failures)

    def is_injective(self) -> bool:
        values = [self.assignment[a] for a in self.source.elements]
        return len(set(values)) == len(values)


def join_lift(
    phi: Mapping[Simplex, Subcomplex],
    source: Complex,
    target: Complex,
    *,
    bound: int = DEFAULT_POSET_BOUND,
    verify: bool = True,
) -> LatticeHom:
    """Lift a carrier map to the down-set lattices: A maps to the join of its images.

    The lift always preserves joins; for a monotone, strict and total carrier
    it is a full bounded-lattice homomorphism, which is verified here and
    reported as a named axiom failure otherwise.
    """
    src_lattice = downset_lattice(face_poset(source), bound=bound)
    tgt_lattice = downset_lattice(face_poset(target), bound=bound)
    tgt_ideals = set(tgt_lattice.elements)
    assignment = {}
    for ideal in src_lattice.elements:
        image: set[Simplex] = set()
        for s in ideal:
            image.update(phi[s].members())
        assignment[ideal] = frozenset(image)
        if frozenset(image) not in tgt_ideals:
            raise ValidationError("lifted image is not a down-set of the target")
    hom = LatticeHom(src_lattice, tgt_lattice, assignment)
    if verify:
        failures = hom.check()
        if failures:
            raise CarrierAxiomError(failures[0], "join-lift is not a lattice homomorphism")
    return hom


def dual_projection(
    phi: Mapping[Simplex, Subcomplex],
    source: Complex,
    target: Complex,
) -> dict[Simplex, Simplex]:
    """The order-preserving map dual to a carrier: each target simplex goes to
    the unique minimal source simplex whose image contains it.

    Totality of the carrier guarantees a candidate exists; strictness
    guarantees the minimal candidate is unique.  Either failure raises a
    named axiom error rather than silently picking a representative.
    """
    rho: dict[Simplex, Simplex] = {}
    for tau in target:
        candidates = [s for s in source if tau in phi[s]]
        if not candidates:
            raise CarrierAxiomError("totality", f"no source simplex carries {tau!r}")
        candidate_set = set(candidates)
        minimal = [
            s
            for s in candidates
            if not any(f in candidate_set for f in s.faces(proper=True))
        ]
        if len(minimal) != 1:
            raise CarrierAxiomError(
                "strictness", f"{tau!r} has {len(minimal)} incomparable minimal carriers"
            )
        rho[tau] = minimal[0]
    return rho


def poset_to_dot(p: Poset, graph_name: str = "poset", labeller=None) -> str:
    """DOT rendering of a poset's Hasse diagram (covering arcs only)."""
    labeller = labeller or (lambda a: str(a))
    index = {a: i for i, a in enumerate(p.elements)}
    lines = [f"digraph {graph_name} {{", "  rankdir=BT;"]
    for a, i in index.items():
        lines.append(f'  n{i} [label="{labeller(a)}"];')
    for b in p.elements:
        for a in p.covers(b):
            lines.append(f"  n{index[a]} -> n{index[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def lattice_to_dot(lattice: FiniteLattice, graph_name: str = "lattice") -> str:
    """DOT rendering of a lattice's Hasse diagram.

    Down-set elements render as brace-sets of their members, anything else
    as plain text.
    """

    def labeller(a):
        if isinstance(a, frozenset):
            parts = sorted((str(x) for x in a))
            return "{" + ",".join(parts) + "}"
        return str(a)

    return poset_to_dot(lattice.as_poset(), graph_name, labeller)


def birkhoff_roundtrip(p: Poset, *, bound: int = DEFAULT_POSET_BOUND) -> bool:
    """Check that join-irreducibles of the down-set lattice recover the poset.

    Uses the canonical matching a -> down-set of a (which is what the duality
    asserts) instead of a general isomorphism search.
    """
    lattice = downset_lattice(p, bound=bound)
    ji = join_irreducibles(lattice)
    principal = {a: p.down_set(a) for a in p.elements}
    if set(ji.elements) != set(principal.values()):
        return False
    if len(set(principal.values())) != len(p):
        return False
    for a in p.elements:
        for b in p.elements:
            if p.leq(a, b) != ji.leq(principal[a], principal[b]):
                return False
    return True
