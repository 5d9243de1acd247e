"""Symplectic treatment of truncated Schrodinger dynamics.

States on a truncated basis carry the symplectic form Im<.|.>; Hermitian
generators give Hamiltonian flows; the norm-squared momentum map reduces the
dynamics onto projective space.  See the module docstrings for conventions.
"""

from .hilbert import (
    BasisSpec,
    StateVector,
    TangentVector,
    coherent_state,
    inner,
    norm,
    symplectic_form,
)
from .operators import OperatorMatrix, build_named, commutator, metaplectic_set
from .dynamics import (
    CoefficientFn,
    IntegratorSpec,
    TDepHamiltonian,
    hamiltonian_function,
    propagate,
)
from .reduction import (
    Ray,
    commuting_diagram_residual,
    fubini_study_distance,
    level_set_project,
    momentum_map,
    ray_of,
    reduced_propagate,
)

__version__ = "0.1.0"
