"""Exception hierarchy shared by all modules."""


class CogStateError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CogStateError, ValueError):
    """Inputs violate a documented invariant (mapped to exit code 2 by the CLI)."""


# gaussian side
class CaseMismatch(ValidationError):
    pass


class InvalidSplit(ValidationError):
    pass


class EmptyRegion(CogStateError):
    pass


class MissingAssertion(ValidationError):
    """A capacity statement needs a caller-asserted condition (7) or (8)."""


class DegenerateState(ValidationError):
    pass


class SingularCovariance(CogStateError):
    pass


# discrete side
class AxisOverlap(ValidationError):
    pass


class BadFactorization(ValidationError):
    pass


class MarkovViolation(ValidationError):
    pass


class NotDegraded(ValidationError):
    pass


class NotSemidet(ValidationError):
    pass


class InfeasibleCaps(ValidationError):
    pass


# simulator
class MemoryCap(ValidationError):
    pass


class EncoderFailure(CogStateError):
    def __init__(self, layer: str):
        super().__init__(f"no typical {layer}-codeword in bin")
        self.layer = layer


class DecodeFailure(CogStateError):
    pass


class CheckFailure(CogStateError):
    """An internal consistency check failed (exit code 3)."""


# symbolic elimination
class MismatchReport(CheckFailure):
    """A derived inequality system differs from the expected one."""

    def __init__(self, extra, missing):
        super().__init__(f"{len(extra)} extra and {len(missing)} missing rows")
        self.extra = list(extra)
        self.missing = list(missing)


class UnboundedWitness(CogStateError, UserWarning):
    """Redundancy pruning met an infeasible system, so every row is vacuously implied.

    Issued as a warning; pruning still returns a canonical infeasible system.
    """
