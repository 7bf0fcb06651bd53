"""Higher-rank numerical ranges and quantum error correction for unitary noise.

The package computes rank-k numerical ranges, builds projections that
compress an operator to a scalar, and turns them into verified codes and
recovery channels for bi-unitary and randomized-unitary channels.
"""

from .channel import (
    BiUnitaryChannel,
    DensityMatrix,
    KrausChannel,
    apply,
    buc_reduce,
    make_buc,
    random_unitary,
    unitary_mixture,
    z1,
    zz,
)
from .codesearch import (
    CodeFamily,
    CodeProjection,
    CommonCodeResult,
    SearchBudget,
    find_codes_buc4,
    multi_unitary_common_code,
    pauli_demo_channel,
    twoqubit_generic_solve,
    z1_code,
    zz_code,
)
from .errors import CompQECError, NumericalFailure, PreconditionError
from .matcore import (
    DEFAULT_TOLERANCES,
    Projection,
    Spectrum,
    ToleranceConfig,
    hermitian_eigendecomposition,
    normal_eigendecomposition,
    scalar_compression_check,
)
from .numrange import (
    RangeResult,
    chord_intersection,
    hermitian_range,
    hermitian_range_projection,
    normal_hull_membership,
    unitary4_rank2_projection,
    unitary4_rank2_range,
    unitary_rank2_any_dim,
)
from .qec import (
    LambdaMatrix,
    RecoveryChannel,
    VerificationReport,
    build_recovery,
    family_verify,
    kl_verify,
    verify_recovery,
)

__version__ = "0.1.0"
