"""Entropy sandwich bounds from Kraus representations.

Builds the flagged channel ``rho -> sum_m K_m rho K_m^† ⊗ |m><m|`` and its
isometric dilation from any Kraus set, evaluates the strong-subadditivity
and relative-entropy monotonicity chains it sits in, and searches unitary
remixes of the Kraus operators for tighter middle terms.
"""

__version__ = "0.1.0"

from .channels import (
    DilationResult,
    KrausSet,
    apply_channel,
    apply_ls_channel,
    build_dilation,
    embed_on_subsystem,
    remix_kraus,
    validate_kraus,
)
from .entropy import (
    DensityMatrix,
    conditional_entropy,
    conditional_via_relative,
    relative_entropy,
    von_neumann_entropy,
)
from .inequalities import (
    SlackReport,
    check_fin_equivalence,
    check_ls9,
    check_ls_main,
    check_monotonicity_form,
    check_sandwich,
    check_ssa,
)
from .linalg import (
    Spectrum,
    SystemLayout,
    hermitian_eig,
    kron,
    matrix_log_on_support,
    partial_trace,
    support_projector,
)
from .optimizer import RemixObjective, RemixTrace, evaluate_objective, parametrize_unitary, tighten
from .samplers import SeededGenerator, random_density_matrix, random_kraus_set, random_unitary
