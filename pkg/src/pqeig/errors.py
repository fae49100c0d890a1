class ParameterError(ValueError):
    """A numeric parameter lies outside its admissible domain."""


class FieldError(ValueError):
    """A field holds non-finite or otherwise invalid nodal values."""


class ShapeError(ValueError):
    """Fields live on different grids."""


class ProjectionError(ArithmeticError):
    """A pair cannot be rescaled onto the constraint set."""


class SolverError(RuntimeError):
    pass


class AlignmentError(ValueError):
    pass


class OracleError(RuntimeError):
    pass


class ConfigError(ValueError):
    pass
