"""Exception hierarchy shared by all catspread modules."""


class CatSpreadError(ValueError):
    """Base class for every error raised by catspread."""


class SimplexError(CatSpreadError):
    """Probability vector is not on the simplex."""


class DomainError(CatSpreadError):
    """Input lies outside the domain of a formula."""


class DegenerateDenominatorError(DomainError):
    """Lin distance denominator ``log(pi_k + pi_k')`` vanishes."""

    def __init__(self, pair):
        self.pair = tuple(pair)
        super().__init__(
            "degenerate denominator: pi_%d + pi_%d = 1 gives log(1) = 0"
            % (self.pair[0] + 1, self.pair[1] + 1))


class DimensionError(CatSpreadError):
    """Matrix dimension does not match the number of categories."""


class NegativeTypeError(CatSpreadError):
    """Distance matrix produced a negative squared distance variance."""


class SampleSizeError(CatSpreadError):
    """Sample too small for the requested estimator."""
