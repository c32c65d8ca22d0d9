"""Exception types raised by the checks.

Each error carries a short machine-readable ``code`` so that reports and the
command line can classify failures without parsing messages.
"""


class OsdualError(Exception):
    code = "ERROR"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details


class NotPositiveError(OsdualError):
    """A form that should be positive semidefinite has a negative direction.

    ``eigenvalue`` is the most negative eigenvalue and ``eigenvector`` the
    corresponding direction, in the coordinates of the offending Gram.
    """

    code = "NOT_POSITIVE"

    def __init__(self, message, eigenvalue, eigenvector):
        super().__init__(message, eigenvalue=eigenvalue)
        self.eigenvalue = float(eigenvalue)
        self.eigenvector = eigenvector


class InvarianceViolation(OsdualError):
    code = "INVARIANCE_VIOLATION"


class RelationViolation(OsdualError):
    code = "RELATION_VIOLATION"


class NonSelfAdjointError(OsdualError):
    code = "NON_SELFADJOINT"


class NonContractiveError(OsdualError):
    code = "NON_CONTRACTIVE"


class InconsistentSamplesError(OsdualError):
    code = "INCONSISTENT_SAMPLES"


class MissingSampleError(OsdualError):
    code = "MISSING_SAMPLE"


class SingularDenominatorError(OsdualError):
    code = "SINGULAR_DENOMINATOR"


class DomainEscapeError(OsdualError):
    code = "DOMAIN_ESCAPE"


class IllConditionedError(OsdualError):
    code = "ILL_CONDITIONED"


class InvalidRankError(OsdualError):
    code = "INVALID_RANK"


class SupportViolation(OsdualError):
    code = "SUPPORT_VIOLATION"


class NotInvariantError(OsdualError):
    code = "NOT_INVARIANT"


class TruncationWarning(UserWarning):
    """Boundary mass or tail coefficients exceed the truncation threshold."""


class UnresolvedError(OsdualError):
    """The truncation is too coarse to exhibit the expected negative direction."""

    code = "UNRESOLVED"
