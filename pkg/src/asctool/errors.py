"""Exception hierarchy shared by all modules."""


class AlgebraError(ValueError):
    """Malformed algebra, term or file data."""


class SignatureMismatch(AlgebraError):
    pass


class TermError(AlgebraError):
    """Unknown symbol, arity mismatch or out-of-range element in a term."""


class NotACongruence(AlgebraError):
    pass


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class CapExceeded(RuntimeError):
    """A resource cap stopped a construction or search.

    ``stats`` carries whatever partial information was available when the cap
    fired (sizes reached, ranks explored), so callers can report it.
    """

    def __init__(self, message, **stats):
        super().__init__(message)
        self.stats = stats
