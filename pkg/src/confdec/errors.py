"""Exception types shared across the package.

Validation-type errors signal bad inputs or configuration; numerical-type
errors signal a computation that started from valid inputs but could not
be completed to the requested accuracy.  The CLI maps the former to exit
code 2 and the latter to exit code 3.
"""


class ConfdecError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimension(ConfdecError):
    """Spacetime dimension outside the supported range (integer D >= 3)."""


class NonPhysicalMetric(ConfdecError):
    """Conformal factor would be complex: amplitude < -1 with D = 5 or D > 6."""


class ResolutionError(ConfdecError):
    """Grid step too coarse for the correlation time (dt > tau/8)."""


class IndefiniteCovariance(ConfdecError):
    """Tabulated correlation has a negative spectral component."""


class OutOfRange(ConfdecError):
    """Field lookup outside the sampled interval."""


class EvenOrderRejected(ConfdecError):
    """Moment check asked for an even order; only odd orders are meaningful."""


class InsufficientSamples(ConfdecError):
    """Monte Carlo ensemble smaller than the minimum (100 samples)."""


class UndersampledSignal(ConfdecError):
    """Coherence magnitude indistinguishable from noise (|mean| <= 5 stderr)."""


class FitDegenerate(ConfdecError):
    """Rate fit attempted on a T range spanning less than a factor of two."""


class QuadratureFailure(ConfdecError):
    """Adaptive quadrature did not reach the requested tolerance."""


class StepTooLarge(ConfdecError):
    """Split-step halving check changed the result by more than the tolerance."""


class SubPlanckCutoff(ConfdecError):
    """Cutoff model requested below the Planck scale (lambda_cut < 1)."""


VALIDATION_ERRORS = (
    InvalidDimension,
    NonPhysicalMetric,
    ResolutionError,
    IndefiniteCovariance,
    OutOfRange,
    EvenOrderRejected,
    InsufficientSamples,
    FitDegenerate,
    SubPlanckCutoff,
    ValueError,
    OSError,
)

NUMERICAL_ERRORS = (
    UndersampledSignal,
    QuadratureFailure,
    StepTooLarge,
)
