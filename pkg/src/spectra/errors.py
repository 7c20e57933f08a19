"""Exception taxonomy shared by all modules.

The CLI maps these onto exit codes: validation and domain errors exit 2,
resource and budget exhaustion exit 3.
"""


class SpectraError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SpectraError):
    """Input violates a structural invariant (bad construction data)."""


class DomainError(SpectraError):
    """An argument lies outside the domain of the operation."""


class ResourceLimitError(SpectraError):
    """A configured size guard or enumeration bound was exceeded."""


class CarrierAxiomError(ValidationError):
    """A carrier map failed one of its axioms; the axiom is named.

    Raised instead of silently picking a repair: a violated axiom means
    the protocol construction feeding the carrier is broken.
    """

    def __init__(self, axiom: str, detail: str = ""):
        self.axiom = axiom
        msg = f"carrier axiom violated: {axiom}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class SearchTimeout(SpectraError):
    """A decision-map search ran out of budget.

    ``deepest_completed`` is the largest round that was searched
    exhaustively before the budget ran out (-1 if none).
    """

    def __init__(self, deepest_completed: int):
        self.deepest_completed = deepest_completed
        super().__init__(
            f"search budget exceeded; deepest fully searched round: {deepest_completed}"
        )
