"""SOR-type stationary iterations as discrete gradient schemes for SPD systems."""

__version__ = "0.1.0"

from .classical import (
    ClassicalMethod,
    ClassicalSpec,
    classical_iteration_matrix,
    classical_run,
    classical_sweep,
)
from .discrete_gradients import (
    AxiomReport,
    BlockItohAbe,
    DiscreteGradient,
    check_axioms,
    discrete_gradient,
)
from .energy import component_decrement, energy, gradient
from .equivalence import (
    EquivalenceReport,
    check_equivalence,
    euler_connection_matrix,
    h_to_omega,
    omega_to_h,
)
from .errors import *  # noqa: F401,F403
from .linalg import (
    BlockSplitting,
    Preconditioner,
    SpdSystem,
    Splitting,
    block_split,
    exact_flow,
    expm,
    lu_solve,
    spectral_radius,
    split,
)
from .mmio import load_matrix_market, write_matrix_market
from .schemes import IterationTrace, Method, SchemeSpec, iteration_matrix, run, step
