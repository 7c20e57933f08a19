"""Instant communication graphs, message-adversary families, and journeys.

A round of communication among processes 0..d is an instant digraph: an arc
(p, q) means q receives p's message this round.  Every process receives its
own value, so self-loops are structural: graphs without them are rejected
at construction rather than patched up.

Adversaries here are oblivious: a family of permitted letters, iterated
freely.  The snapshot family keeps the letters whose in-neighborhoods are
totally ordered by inclusion; the immediate-snapshot family additionally
requires the arc relation to be transitive.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import DomainError, ResourceLimitError, ValidationError

FULL = "full"
IS = "is"
IIS = "iis"
FAMILIES = (FULL, IS, IIS)

DEFAULT_MAX_D = 3
DEFAULT_MAX_WORDS = 200_000


class Digraph:
    """An instant graph on processes 0..d; arcs are ordered pairs."""

    __slots__ = ("d", "arcs", "_in", "_hash")

    def __init__(self, d: int, arcs: Iterable[tuple[int, int]]):
        if d < 0:
            raise ValidationError("process count parameter d must be >= 0")
        self.d = d
        arc_set = frozenset((int(u), int(v)) for u, v in arcs)
        for (u, v) in arc_set:
            if not (0 <= u <= d and 0 <= v <= d):
                raise ValidationError(f"arc ({u},{v}) outside process range 0..{d}")
        for p in range(d + 1):
            if (p, p) not in arc_set:
                raise ValidationError(f"missing self-loop at process {p}")
        self.arcs = arc_set
        self._in = {
            q: frozenset(u for (u, v) in arc_set if v == q) for q in range(d + 1)
        }
        self._hash = hash((d, arc_set))

    @classmethod
    def with_self_loops(cls, d: int, arcs: Iterable[tuple[int, int]] = ()) -> "Digraph":
        return cls(d, set(arcs) | {(p, p) for p in range(d + 1)})

    @classmethod
    def complete(cls, d: int) -> "Digraph":
        return cls(d, product(range(d + 1), repeat=2))

    def in_set(self, q: int) -> frozenset[int]:
        """Processes whose round-r message reaches q (always includes q)."""
        try:
            return self._in[q]
        except KeyError:
            raise DomainError(f"process {q} outside range 0..{self.d}") from None

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def induced_arcs(self, processes: Iterable[int]) -> frozenset[tuple[int, int]]:
        procs = set(processes)
        return frozenset((u, v) for (u, v) in self.arcs if u in procs and v in procs)

    def sort_key(self):
        return tuple(sorted(self.arcs))

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.d == other.d and self.arcs == other.arcs

    def __hash__(self):
        return self._hash

    def __repr__(self):
        cross = sorted((u, v) for (u, v) in self.arcs if u != v)
        return f"Digraph(d={self.d}, cross={cross})"


def has_containment(g: Digraph) -> bool:
    """In-neighborhoods totally ordered by inclusion (snapshot letters)."""
    ins = [g.in_set(p) for p in range(g.d + 1)]
    for a, b in product(ins, repeat=2):
        if not (a <= b or b <= a):
            return False
    return True


def has_immediacy(g: Digraph) -> bool:
    """Arc relation transitive: relayed information arrived directly too."""
    for (a, b) in g.arcs:
        for (b2, c) in g.arcs:
            if b == b2 and (a, c) not in g.arcs:
                return False
    return True


def _family_predicate(family: str):
    if family == FULL:
        return lambda g: True
    if family == IS:
        return has_containment
    if family == IIS:
        return lambda g: has_containment(g) and has_immediacy(g)
    raise ValidationError(f"unknown adversary family {family!r}; expected one of {FAMILIES}")


def enumerate_letters(d: int, family: str, *, max_d: int = DEFAULT_MAX_D) -> tuple[Digraph, ...]:
    """All instant graphs of the family on processes 0..d, canonically ordered.

    The enumeration is exponential in d**2, hence the bound (default 3).
    """
    if d > max_d:
        raise ResourceLimitError(f"letter enumeration bounded at d <= {max_d}, got {d}")
    predicate = _family_predicate(family)
    cross = [(u, v) for u in range(d + 1) for v in range(d + 1) if u != v]
    letters = []
    for mask in product((False, True), repeat=len(cross)):
        chosen = [arc for arc, keep in zip(cross, mask) if keep]
        g = Digraph.with_self_loops(d, chosen)
        if predicate(g):
            letters.append(g)
    return tuple(sorted(letters, key=Digraph.sort_key))


@dataclass(frozen=True)
class GraphWord:
    """A finite word of instant graphs over a common process range."""

    letters: tuple[Digraph, ...]

    def __post_init__(self):
        ds = {g.d for g in self.letters}
        if len(ds) > 1:
            raise ValidationError(f"letters disagree on d: {sorted(ds)}")

    def __len__(self):
        return len(self.letters)

    @property
    def d(self) -> int:
        if not self.letters:
            raise DomainError("empty word has no process range")
        return self.letters[0].d

    def at_round(self, r: int) -> Digraph:
        """The instant graph of round r (rounds are 1-based)."""
        if not (1 <= r <= len(self.letters)):
            raise DomainError(f"round {r} outside 1..{len(self.letters)}")
        return self.letters[r - 1]


class Adversary:
    """An oblivious adversary: a letter family iterated round after round."""

    def __init__(
        self,
        d: int,
        family: str | None = None,
        letters: Iterable[Digraph] | None = None,
        *,
        max_d: int = DEFAULT_MAX_D,
    ):
        if (family is None) == (letters is None):
            raise ValidationError("give exactly one of family= or letters=")
        self.d = d
        self.family = family
        if letters is not None:
            letter_list = tuple(letters)
            for g in letter_list:
                if not isinstance(g, Digraph):
                    raise ValidationError(f"letters must be digraphs, got {type(g).__name__}")
                if g.d != d:
                    raise ValidationError(f"letter has d={g.d}, adversary has d={d}")
            self._letters = tuple(sorted(set(letter_list), key=Digraph.sort_key))
        else:
            self._letters = enumerate_letters(d, family, max_d=max_d)

    def letters(self) -> tuple[Digraph, ...]:
        return self._letters

    def __repr__(self):
        name = self.family if self.family else f"explicit[{len(self._letters)}]"
        return f"Adversary(d={self.d}, {name})"


def journey_exists(word: GraphWord | Sequence[Digraph], p: int, q: int, start_round: int = 1) -> bool:
    """Is there a causal path p -> q using strictly increasing rounds >= start_round?

    A journey hops along arcs of later and later letters; the empty journey
    makes every process causally influence itself.
    """
    letters = word.letters if isinstance(word, GraphWord) else tuple(word)
    if letters:
        d = letters[0].d
        if not (0 <= p <= d and 0 <= q <= d):
            raise DomainError(f"process outside range 0..{d}")
    elif p != q and (p < 0 or q < 0):
        raise DomainError("process ids must be non-negative")
    if not (1 <= start_round <= len(letters) + 1):
        raise DomainError(f"start round {start_round} outside 1..{len(letters) + 1}")
    reached = {p}
    for r in range(start_round, len(letters) + 1):
        g = letters[r - 1]
        reached |= {v for (u, v) in g.arcs if u in reached}
    return q in reached


def prefixes(
    adversary: Adversary, r: int, *, max_words: int = DEFAULT_MAX_WORDS
) -> tuple[GraphWord, ...]:
    """All length-r words over the adversary's letters, canonically ordered."""
    if r < 0:
        raise DomainError("prefix length must be >= 0")
    n = len(adversary.letters())
    if n**r > max_words:
        raise ResourceLimitError(f"{n}^{r} words exceed the bound of {max_words}")
    return tuple(GraphWord(combo) for combo in product(adversary.letters(), repeat=r))


def adversary_to_json_dict(d: int, letters: Iterable[Digraph]) -> dict:
    return {"d": d, "graphs": [[list(a) for a in sorted(g.arcs)] for g in letters]}


def word_from_json_dict(data: dict) -> GraphWord:
    try:
        d = int(data["d"])
        graphs = data["graphs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("word JSON needs integer 'd' and a 'graphs' list") from exc
    return GraphWord(tuple(Digraph(d, [(int(u), int(v)) for (u, v) in g]) for g in graphs))
