"""Exception hierarchy shared by all modules."""


class CosetWalkError(Exception):
    pass


class MixedModel(CosetWalkError):
    pass


class NonUnimodular(CosetWalkError):
    pass


class BudgetExceeded(CosetWalkError):
    def __init__(self, radius, limit, what="elements"):
        self.radius = radius
        self.limit = limit
        super().__init__(f"budget of {limit} {what} exceeded at radius {radius}")


class UnsupportedFamily(CosetWalkError):
    pass


class FallbackTooSlow(CosetWalkError):
    pass


class UnknownKey(CosetWalkError):
    pass


class EmptyAlphabet(CosetWalkError):
    pass


class InsufficientData(CosetWalkError):
    pass


class ZeroDenominator(CosetWalkError):
    pass


class NotPrimitive(CosetWalkError):
    pass


class NotUnipotent(CosetWalkError):
    pass


class FixedSpaceTrivial(CosetWalkError):
    pass


class ConflictingEvidence(CosetWalkError):
    pass


class UnknownExample(CosetWalkError):
    pass


class ConfigError(CosetWalkError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
