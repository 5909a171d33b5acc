"""Exact bookkeeping for local symplectic field theory in dimension four.

Submodules:

* ``orbits`` -- Reeb orbits, iterates, Conley-Zehnder indices, gradings.
* ``covers`` -- branched-cover combinatorics: indices, dimensions,
  obstruction ranks, boundary strata, and the Hurwitz oracle.
* ``algebra`` -- the exact graded supercommutative series engine with the
  kappa-weighted Poisson bracket.
* ``potentials`` -- count tables, generating functions, the ``#``
  composition and the Hamilton-Jacobi pairing.
* ``exceptional`` -- exceptional-sphere invariants, the -1/4 descendant
  count, neck splitting equations, and the elliptic-orbit obstruction.
* ``config`` / ``cli`` -- the plain-text document format and the command
  line front end.
"""

from .algebra import GradedSeries, Variable, multiply, partial, poisson_bracket, substitute
from .covers import (
    BaseCurve,
    CoverSpec,
    NeckSplit,
    StrataGraph,
    boundary_strata,
    branch_count,
    cokernel_rank,
    cylinder_over,
    fredholm_index,
    hurwitz_count,
    normal_chern_numbers,
    tangency_dimension,
    tangency_report,
)
from .exceptional import (
    DescendantSpec,
    NeckConfiguration,
    descendant_copies,
    elliptic_necessity,
    exceptional_invariants,
    lagrangian_genus_gate,
    recursion_pipeline,
    splitting_equations,
    standard_neck,
)
from .orbits import (
    OrbitCollection,
    OrbitIterate,
    OrbitRegistry,
    ReebOrbit,
    cz_defect,
    cz_iterate,
    is_good,
    variable_degree,
)
from .potentials import (
    CountTable,
    Potential,
    assert_hamiltonian_vanishes,
    compose_sharp,
    hamilton_jacobi_rhs,
    hamiltonian_from_counts,
    identity_potential,
    lagrangian_restrict,
    potential_from_counts,
    potential_to_counts,
    transform_potential,
)

__version__ = "0.1.0"
