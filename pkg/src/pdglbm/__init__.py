"""Palindromic high-order time stepping for DG lattice-Boltzmann relaxation schemes.

Two-velocity kinetic relaxation of 1D conservation laws, an implicit
upwind nodal DG transport solved by a triangular sweep, Crank-Nicolson
BGK collisions and real or complex palindromic compositions of the
asymptotic-preserving second-order splitting.
"""

from .dg import BoundaryCondition, DgMesh, Transport, cfl_dt, gauss_lobatto
from .errors import (
    ConfigError,
    InadmissibleStateError,
    ModelEvaluationError,
    PdglbmError,
    SingularCollisionError,
    SingularFluxError,
    StageError,
    TransportSolverError,
    UnstableRunError,
)
from .fluxes import euler_model, isothermal_model, make_model
from .harness import RunConfig, RunReport, converge, load_config, riemann_compare, run, simulate
from .lattice import LatticeModel, check_subcharacteristic, maxwellian, moments, reverse_velocities
from .palindrome import SCHEMES, CompositionScheme, build_plan, get_scheme, step
from .reference import contact_wave_exact, l2_error, observed_order, solve_riemann_isothermal
from .relaxation import RelaxationParams, collide_c1, collide_c2

__version__ = "0.1.0"
