"""Heights of number-field subspaces, principal angles, constructive going-down,
and Diophantine approximation exponents."""

from .config import TOL, Tolerances, default_tolerances
from .numberfield import (FieldElement, NumberField, builtin_field_names,
                          field_from_spec, get_field)
from .exterior import MultiVector, gen_det, inner, norm, wedge, wedge_rows
from .subspaces import SubspaceOverK, subspace, subspace_from_spec
from .geometry import (NumericSubspace, PrincipalData, dist_point_subspace,
                       from_basis, mu, mu_wedge, omega_i, orth_complement,
                       principal_data, proj_dist, span)
from .height import (conjugate_subspace, height_breakdown, height_ideal,
                     height_lattice, hermitian_complement, phi_complement)
from .lattice import (BodySpec, EmbeddedLattice, LatticePoint, det_lattice,
                      find_point_in_body, full_lattice, lattice_of_subspace,
                      lll_reduce, rho)
from .goingdown import (GoingDownCertificate, GoingDownInput, assemble_Bm1,
                        build_body, decompose_W, going_down,
                        second_branch_schedule)
from .exponents import (RecordCurve, check_chain, enumerate_subspaces,
                        estimate_exponents, record_curve, transfer_experiment)

__version__ = "0.1.0"
