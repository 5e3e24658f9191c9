from django.core.exceptions import ValidationError


class InvariantError(ValidationError):
    """A structural invariant of an input object does not hold.

    ``code`` names the violated invariant, ``params`` carries the witness.
    """

    default_code = "invariant"

    def __init__(self, message, code=None, params=None):
        super().__init__(message, code=code or self.default_code, params=params or {})

    def as_dict(self):
        return {"error": self.code, "message": self.message, "params": self.params}


class DegreeOutOfRange(InvariantError):
    default_code = "degree-out-of-range"


class TruncationError(InvariantError):
    default_code = "insufficient-truncation"


class NotACocycle(InvariantError):
    default_code = "not-a-cocycle"

    @property
    def cell(self):
        return self.params.get("cell")


class BoundExceeded(Exception):
    """A computation was refused because it exceeds a configured bound."""

    def __init__(self, message, bound, value):
        super().__init__(message)
        self.bound = bound
        self.value = value

    def as_dict(self):
        return {
            "error": "bound-exceeded",
            "message": str(self),
            "params": {"bound": self.bound, "value": self.value},
        }
