"""Exception hierarchy shared by all modules."""


class SpeclabError(Exception):
    """Base class. ``exit_code`` is what the CLI returns when this escapes."""

    exit_code = 3


class InputError(SpeclabError, ValueError):
    exit_code = 3


class SingularGenerator(InputError):
    pass


class NotAFrame(SpeclabError):
    exit_code = 2


class NonPositiveOmega(NotAFrame):
    pass


class MaskNotSubset(InputError):
    pass


class BadDivisor(InputError):
    pass


class NotOrthonormal(InputError):
    pass


class WeightsNotNormalized(InputError):
    pass


class EmptyInterval(InputError):
    pass


class DeltaOutOfRange(InputError):
    pass


class POutOfRange(InputError):
    pass


class NonPositiveInput(InputError):
    pass


class NotHermitian(InputError):
    pass


class NoConvergence(SpeclabError, ArithmeticError):
    exit_code = 1


class AllInfinite(SpeclabError, ArithmeticError):
    exit_code = 1


class ConfigError(InputError):
    """Collects every problem found in a config, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class ParseError(InputError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class ValidationError(InputError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
