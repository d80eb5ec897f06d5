"""Exception types shared across the package.

Numerical checks that merely *fail* produce report entries, not exceptions;
exceptions are reserved for contract violations and oracle disagreements.
"""


class SGBreatherError(Exception):
    """Base class for all package errors."""


class DomainError(SGBreatherError, ValueError):
    """Parameter outside its documented range (e.g. coupling not in (0,1))."""


class PoleProximity(SGBreatherError):
    """Evaluation point too close to an enumerated pole."""


class NotASimplePole(SGBreatherError):
    """Residue requested at a location that is not a simple pole."""


class OracleMismatch(SGBreatherError):
    """Analytic value and independent numerical oracle disagree.

    This signals a bookkeeping bug, not a numerical tolerance issue."""


class AxiomViolation(SGBreatherError):
    """A constructed amplitude fails unitarity/crossing beyond tolerance."""


class PositivityViolation(SGBreatherError):
    """Residue-sign condition violated (informational; models carry a flag)."""


class NegativeResidue(SGBreatherError):
    """-i * res S is not a positive real at an s-channel pole, so no
    admissible bound-state coupling exists."""


class FitInconsistent(SGBreatherError):
    """Coupling fit varies across probes beyond tolerance."""


class TruncationOverflow(SGBreatherError):
    """Operator application would populate a sector above the truncation."""


class BudgetExceeded(SGBreatherError):
    """Combinatorial budget exhausted (n! symmetrization bound)."""


class StripViolation(SGBreatherError):
    """Analytic continuation requested outside the certified region."""


class DomainViolation(SGBreatherError):
    """Vector lacks the analyticity certificate an operator requires."""


class HypothesisViolation(SGBreatherError):
    """A mechanically checkable theorem hypothesis does not hold.

    Carries the name of the failed hypothesis in args[0]."""


class PoleOnPath(SGBreatherError):
    """An integrand pole lies too close to an integration contour."""


class InterpolationWarning(UserWarning):
    """Boost action required off-grid interpolation."""


class QuadratureWarning(UserWarning):
    """Estimated quadrature error exceeds the requested tolerance."""


class TailWarning(UserWarning):
    """Integrand tail at the truncated contour ends exceeds the target."""


class ConfigError(SGBreatherError):
    """Malformed or out-of-range run configuration."""
