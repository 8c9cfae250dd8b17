"""Exception types shared across the package."""


class TplecError(Exception):
    """Base class for every error this package raises on bad input."""


class TooFewPoints(TplecError):
    """Fewer data points than the fit requires."""


class NonPositiveValue(TplecError):
    """A value that must be strictly positive is zero or negative."""


class DegenerateX(TplecError):
    """All x values coincide, so the slope is undefined."""


class SingularNormalEquations(TplecError):
    """Damped normal matrix stayed singular even at maximum damping."""


class NoAsymptote(TplecError):
    """The fitted curve has no interior maximum (w <= 0 or d >= 0)."""


class EmptyCommunity(TplecError):
    """All counts in a community are zero."""


class InvalidPermutation(TplecError):
    """Accumulation order is not a permutation of 0..n-1."""


class MalformedHeader(TplecError):
    """Input file header does not match the expected layout."""


class RaggedRow(TplecError):
    """Row length disagrees with the header."""


class UnparseableDate(TplecError):
    """A date column could not be parsed."""


class UnparseableCount(TplecError):
    """A count cell is not a nonnegative integer."""


class NegativeCount(TplecError):
    """Abundance counts must be nonnegative."""


class DuplicateSampleId(TplecError):
    """The same sample identifier appears twice."""


class UnmappedCountry(TplecError):
    """A country in the series has no continent assignment."""


class MisalignedDates(TplecError):
    """Series do not share a common date axis."""


class DateOutOfRange(TplecError):
    """Requested date lies outside the series' date range."""
