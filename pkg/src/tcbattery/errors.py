class ConfigError(ValueError):
    """Invalid physical parameters or sweep specification."""


class NumericalError(ArithmeticError):
    """A numerical routine produced an unusable result."""


class ConvergenceError(NumericalError):
    def __init__(self, dim: int, index: int, iterations: int):
        self.dim = dim
        self.index = index
        self.iterations = iterations
        super().__init__(
            f"tridiagonal QL iteration did not converge for eigenvalue {index} "
            f"of a {dim}x{dim} matrix after {iterations} iterations"
        )


class OracleSizeError(ValueError):
    """Requested brute-force instance exceeds the dimension cap."""
