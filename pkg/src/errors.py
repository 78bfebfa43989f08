class SeuCornerError(Exception):
    pass


class DatasetParseError(SeuCornerError, ValueError):
    pass


class DatasetValidationError(SeuCornerError, ValueError):
    pass


class PreconditionError(SeuCornerError, ValueError):
    pass


class FamilyDomainError(SeuCornerError, ValueError):
    pass


class SarseuInconclusiveError(SeuCornerError, RuntimeError):
    """Raised instead of a pass when the search could not settle the verdict."""

    def __init__(self, message, max_pairs=None, nodes=None):
        super().__init__(f"inconclusive at bound: {message}")
        self.max_pairs = max_pairs
        self.nodes = nodes


class LpToleranceWarning(UserWarning):
    pass
