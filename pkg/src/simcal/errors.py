"""Exception hierarchy shared by every simcal module.

All failures raise a subclass of :class:`SimcalError` so callers (notably
the CLI) can catch one base type and report the concrete class name as a
machine-readable error code.
"""


class SimcalError(Exception):
    """Base class for all simcal errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# vector / distance layer

class DimensionMismatchError(SimcalError):
    """Two vectors (or a vector and a model) disagree on dimension."""


class NegativeDistanceError(SimcalError):
    """A squash function received a negative or non-finite distance."""


# embedding / pair file layer

class MalformedRecordError(SimcalError):
    """An embedding or pair file line could not be parsed."""


class DuplicateIdError(SimcalError):
    """Two records in one embedding file share an id."""


class InsufficientPairsError(SimcalError):
    """Fewer wrong driver-target combinations exist than were requested."""


class OutOfRangeError(SimcalError):
    """A relatedness score fell outside the 0..5 scale."""


# trainer layer

class EmptyBatchError(SimcalError):
    """A gradient was requested for an empty batch."""


class NonFiniteGradientError(SimcalError):
    """A gradient contained NaN or infinity."""


class UnresolvedIdError(SimcalError):
    """A pair references an id with no embedding record."""


class SingleClassDatasetError(SimcalError):
    """Training data contains only one of the two labels."""


# calibration layer

class SingleClassInputError(SimcalError):
    """Distribution or rate computation needs both classes present."""


class DistanceOutOfRangeError(SimcalError):
    """A squashed distance fell outside [0, 1]."""


class DistributionsInvertedError(SimcalError):
    """The right-match peak sits at or beyond the wrong-match peak."""


class NoCrossingError(SimcalError):
    """The two class distributions are identical, so no threshold exists."""


# accuracy-table layer

class EmptySideError(SimcalError):
    """No distances were supplied for one side of the threshold."""


class WrongSideSampleError(SimcalError):
    """A distance lies on the opposite side of the threshold it was binned for."""


class DegenerateScaleError(SimcalError):
    """Min-max rescaling is undefined when all values are equal."""


class ThresholdMismatchError(SimcalError):
    """An accuracy table was built against a different threshold."""


# reporting layer

class MalformedReportInputError(SimcalError):
    """The density CSV fed to the report renderer is empty or invalid."""
