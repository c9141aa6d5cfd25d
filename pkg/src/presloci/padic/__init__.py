from .characters import fourier_finite, inverse_fourier_finite, witness_max_coeff
from .io import IntegrandFormatError, dump_integrand, load_integrand, parse_phase
from .numeric import (
    EnumerationBudgetError, LocalFieldBackend, NumericResult, numeric_integrate, shell_verdict,
)
from .skeleton import (
    CoordinateSpec, Phase, Reduction, SkeletonCell, SkeletonIntegrand, conjugate_oscillation,
    fiber_volume, integrate_skeleton, locus_padic, reduce_integrand,
)
from .transfer import TransferReport, transfer_check
