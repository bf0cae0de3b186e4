"""Exception hierarchy shared across the package."""


class FairnnError(Exception):
    """Base class for all package errors."""


class BuildError(FairnnError, ValueError):
    """Invalid input to a build routine (bad ids, duplicate members, bad params)."""


class MergeError(FairnnError, ValueError):
    """Attempt to merge incompatible summaries (different hashers/params)."""


class EstimationError(FairnnError, RuntimeError):
    """An estimation routine exceeded its probe budget."""


class SamplingError(FairnnError, RuntimeError):
    """A sampling routine cannot produce a draw (e.g. zero total weight)."""


class RoundCapError(SamplingError):
    """A rejection-sampling loop exceeded its round cap (rare failure event)."""


class SegmentOverflowError(SamplingError):
    """A rank segment held more distinct elements than the acceptance bound
    allows; uniformity can no longer be certified (rare failure event)."""


class ReplicaExhaustionError(SamplingError):
    """Every index replica was tried and each exceeded its outlier budget."""
