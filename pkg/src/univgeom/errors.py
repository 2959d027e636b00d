"""Exception types shared across the package."""


class UnivGeomError(Exception):
    """Base class for all errors raised by univgeom."""


class SignatureError(UnivGeomError, ValueError):
    pass


class ParseError(UnivGeomError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvaluationError(UnivGeomError, ValueError):
    pass


class BoundExceeded(UnivGeomError):
    """A universe or search space grew past the configured size bound."""


class NotACongruence(UnivGeomError, ValueError):
    pass


class NotAHomomorphism(UnivGeomError, ValueError):
    pass


class EmptyVarietyError(UnivGeomError, ValueError):
    """Raised for constructions that need a non-empty algebraic set."""


class InvalidSystem(UnivGeomError, ValueError):
    pass


class SchemaError(UnivGeomError, ValueError):
    pass
