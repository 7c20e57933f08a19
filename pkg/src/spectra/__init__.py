"""Protocol complexes, their truncated limit spaces, and colorless solvability."""

from .adversary import (
    FULL,
    IIS,
    IS,
    Adversary,
    Digraph,
    GraphWord,
    enumerate_letters,
    has_containment,
    has_immediacy,
    journey_exists,
    prefixes,
)
from .complexes import (
    Complex,
    Simplex,
    Subcomplex,
    Vertex,
    check_carrier_map,
    check_simplicial_map,
    complex_from_json,
    complex_to_dot,
    complex_to_json,
    make_complex,
    standard_simplex,
)
from .duality import (
    FiniteLattice,
    LatticeHom,
    Poset,
    birkhoff_roundtrip,
    downset_lattice,
    dual_projection,
    face_poset,
    join_irreducibles,
    join_lift,
    lattice_to_dot,
    poset_to_dot,
)
from .errors import (
    CarrierAxiomError,
    DomainError,
    ResourceLimitError,
    SearchTimeout,
    SpectraError,
    ValidationError,
)
from .protocol import (
    COLORED,
    COLORLESS,
    CarrierStage,
    barycentric_stage,
    barycentric_stages,
    check_stage_axioms,
    chromatic_stage,
    colored_simplex,
    initial_stage,
    iterate,
    one_round,
    project_to_level,
    verify_projection,
)
from .spectral import (
    Classification,
    PointClass,
    ProtocolSequence,
    RationalPoint,
    basis_open,
    carrier_of_point,
    classify_point,
    downset_count,
    enumerate_sequences,
    specialization_leq,
    squared_mesh,
    vertex_coordinates,
)
from .tasks import (
    ORDER_PRESERVING,
    SIMPLICIAL,
    ColorlessTask,
    DecisionMap,
    ProtocolModel,
    Verdict,
    barycentric_agreement_task,
    check_carried,
    consensus_task,
    find_decision_map,
    k_set_agreement_task,
    solve_up_to,
    validate_task,
)

__version__ = "0.1.0"
