from .basis import OccupationBasis, sector_dimension, truncated_dimension
from .fluctuation import (
    QuadraticDynamics,
    evolve_quadratic,
    fluctuation_state,
    number_growth,
    phase_aligned_distance,
)
from .krylov import krylov_expm
from .operators import (
    LadderKind,
    SparseOperator,
    build_hamiltonian,
    field_operator,
    ladder,
    ladder_field,
    number_operator,
    second_quantize,
)
from .states import (
    CentredFamily,
    ManyBodyState,
    evolve_state,
    joint_charfn,
    product_state,
    reduced_density,
    trace_distance,
)
from .weyl import WeylOperator, coherent_state, required_n_max

__all__ = [
    "CentredFamily",
    "LadderKind",
    "ManyBodyState",
    "OccupationBasis",
    "QuadraticDynamics",
    "SparseOperator",
    "WeylOperator",
    "build_hamiltonian",
    "coherent_state",
    "evolve_quadratic",
    "evolve_state",
    "field_operator",
    "fluctuation_state",
    "joint_charfn",
    "krylov_expm",
    "ladder",
    "ladder_field",
    "number_growth",
    "number_operator",
    "phase_aligned_distance",
    "product_state",
    "reduced_density",
    "required_n_max",
    "second_quantize",
    "sector_dimension",
    "trace_distance",
    "truncated_dimension",
]
