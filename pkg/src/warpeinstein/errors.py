"""Exception hierarchy shared by all modules."""


class WarpError(Exception):
    """Base class for every error raised by warpeinstein."""


class DimensionError(WarpError, ValueError):
    """Operand lengths or block sizes do not match."""


class NotNormalizableError(WarpError, ValueError):
    """A direction with non-negative eps-norm cannot be scaled to eps-norm -1."""


class SingularityError(WarpError, ArithmeticError):
    """A metric, conformal factor or ODE denominator vanishes.

    ``location`` is the offending point (or state) and ``value`` the quantity
    that fell below its floor (a determinant, a conformal factor, ...).
    """

    def __init__(self, message, location=None, value=None):
        super().__init__(message)
        self.location = location
        self.value = value


class DomainError(WarpError, ValueError):
    """A positivity or domain requirement fails at a located point."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ParameterError(WarpError, ValueError):
    """Invalid parameters or initial data."""


class NumericError(WarpError, ArithmeticError):
    """A derivative or curvature component came out non-finite."""


class SpecError(WarpError, ValueError):
    """A spec file violates the schema. ``issues`` lists every violation found."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("invalid spec:\n" + "\n".join(f"  - {m}" for m in self.issues))
