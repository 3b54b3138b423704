"""Exception hierarchy shared by all icedrift modules."""


class IcedriftError(Exception):
    """Base class for all errors raised by this package."""


class InputError(IcedriftError):
    """Bad input data: unreadable files, malformed records, unusable tracks."""


class ConfigError(IcedriftError):
    """Invalid configuration or option values."""


class NumericalError(IcedriftError):
    """A numerical routine failed to produce a trustworthy result."""


class MalformedRecord(InputError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyFile(InputError):
    pass


class TooShort(InputError):
    pass


class NoOverlap(InputError):
    pass


class PoleDegenerate(NumericalError):
    pass


class WindowTooShort(InputError):
    pass


class NonFiniteInput(InputError):
    pass


class DegenerateColumn(InputError):
    def __init__(self, column_id: str):
        super().__init__(f"column {column_id!r} is constant (zero variance)")
        self.column_id = column_id


class NoConvergence(NumericalError):
    pass


class BadRank(ConfigError):
    pass


class ShapeMismatch(InputError):
    pass
