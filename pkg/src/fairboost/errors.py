"""Exception types raised across the package."""


class FairboostError(Exception):
    """Base class for all package-specific errors."""


class ContractError(FairboostError):
    """An argument violates a documented precondition (shape, range, simplex)."""


class SchemaError(FairboostError):
    """CSV header or cell contents do not match the declared schema."""


class CardinalityError(FairboostError):
    """The sensitive column holds more than two distinct values."""


class EmptyDatasetError(FairboostError):
    """No rows survive loading or filtering."""


class MissingGroupError(FairboostError):
    """One of the two sensitive groups has no samples."""


class DegenerateLabelError(FairboostError):
    """A continuous label cannot be binarized (all values identical)."""


class BalanceInfeasibleError(FairboostError):
    """A (group, label) cell required for balancing is empty."""


class ResampleNeededError(FairboostError):
    """A train/test partition lost a sensitive group; retry with another seed."""


class DegenerateRangeError(FairboostError):
    """A subpopulation needed for the trade-off range or a rate is empty."""


class LambdaRangeError(FairboostError):
    """Requested trade-off weight lies outside the admissible range."""


class UndefinedRateError(FairboostError):
    """A per-group rate has a zero denominator on the evaluation set."""


class NumericError(FairboostError):
    """An internal numerical identity failed beyond tolerance."""
