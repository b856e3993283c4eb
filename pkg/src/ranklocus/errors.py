"""Exception types raised across the package."""


class RankLocusError(Exception):
    pass


# exact linear algebra
class NotFullColumnRank(RankLocusError, ValueError):
    pass


class InconsistentSystem(RankLocusError, ValueError):
    pass


class DimensionMismatch(RankLocusError, ValueError):
    pass


# exterior algebra and complexes
class DegreeUnderflow(RankLocusError, ValueError):
    pass


class RaggedGrid(RankLocusError, ValueError):
    pass


class IndexOutOfRange(RankLocusError, ValueError):
    pass


class DegreeMismatch(RankLocusError, ValueError):
    pass


class ConventionViolation(RankLocusError, ValueError):
    pass


class MinorTooLarge(RankLocusError, ValueError):
    pass


# constructions
class WindowViolation(RankLocusError, ValueError):
    pass


class NotSurjective(RankLocusError):
    def __init__(self, which, rank=None, rows=None):
        self.which = which
        self.rank = rank
        self.rows = rows
        msg = f"{which} is not surjective"
        if rank is not None:
            msg += f" (rank {rank}, {rows} rows)"
        super().__init__(msg)


class CommutativityFailure(RankLocusError):
    def __init__(self, where):
        self.where = where
        super().__init__(f"square does not commute at {where}")


class InconsistentSolve(RankLocusError):
    pass


class ContractionNotMaximal(RankLocusError):
    def __init__(self, message, profile=None):
        self.profile = profile
        super().__init__(message)


class ConditionViolated(RankLocusError, ValueError):
    pass


class PresentationDegenerate(RankLocusError, ValueError):
    pass


class ParseError(RankLocusError, ValueError):
    pass


class ShapeMismatch(RankLocusError, ValueError):
    pass


# verification
class EnumerationTooLarge(RankLocusError, ValueError):
    pass


class WrongFieldForExhaustive(RankLocusError, ValueError):
    pass


class NotConstant(RankLocusError):
    pass


class NegativeInput(RankLocusError, ValueError):
    pass
