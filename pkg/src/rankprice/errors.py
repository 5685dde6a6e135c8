"""Exception types raised across the package."""


class RankPriceError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstance(RankPriceError):
    """Instance data violates a structural invariant."""


class NonPositiveBudget(InvalidInstance):
    def __init__(self, customer: int, value):
        super().__init__(f"budgets[{customer}] = {value!r}; budgets must be positive integers")
        self.customer = customer
        self.value = value


class TiedPreferences(InvalidInstance):
    def __init__(self, customer: int, score):
        super().__init__(
            f"preferences[{customer}] contains the score {score!r} more than once; "
            "scores must be pairwise distinct within a row"
        )
        self.customer = customer
        self.score = score


class EmptyPreferenceRow(InvalidInstance):
    def __init__(self, customer: int):
        super().__init__(f"preferences[{customer}] has no available product")
        self.customer = customer


class DimensionMismatch(InvalidInstance):
    pass


class LengthMismatch(RankPriceError):
    """Two vectors that must have equal length do not."""


class InvalidRange(RankPriceError):
    """A numeric range or probability parameter is out of bounds."""


class SearchSpaceTooLarge(RankPriceError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"grid holds {size} price vectors, above the enumeration cap {cap}")
        self.size = size
        self.cap = cap


class InstanceReadError(RankPriceError):
    """An instance file could not be read or parsed."""


class OutputWriteError(RankPriceError):
    """An output file or directory could not be written."""


class EmptyInput(RankPriceError):
    """An aggregate operation received no data."""
