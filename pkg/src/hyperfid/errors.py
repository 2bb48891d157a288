"""Exception hierarchy shared by all modules."""


class HyperfidError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(HyperfidError, ValueError):
    def __init__(self, max_asymmetry: float):
        self.max_asymmetry = float(max_asymmetry)
        super().__init__(f"matrix is not Hermitian (max |m - m^H| = {self.max_asymmetry:.3e})")


class NotPSD(HyperfidError, ValueError):
    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue = {self.min_eigenvalue:.3e})")


class DimMismatch(HyperfidError, ValueError):
    def __init__(self, dim_a, dim_b):
        self.dims = (dim_a, dim_b)
        super().__init__(f"dimension mismatch: {dim_a} vs {dim_b}")


class ConvergenceError(HyperfidError, RuntimeError):
    pass


class InvalidDensityMatrix(HyperfidError, ValueError):
    """A matrix failed one of the density-matrix checks; ``check`` names which."""

    def __init__(self, check: str, detail: str):
        self.check = check
        super().__init__(f"invalid density matrix ({check}): {detail}")


class NormExceeded(HyperfidError, ValueError):
    def __init__(self, norm: float, limit: float):
        self.norm = float(norm)
        super().__init__(f"Bloch vector norm {norm!r} exceeds {limit!r}")


class InvalidDim(HyperfidError, ValueError):
    pass


class DomainError(HyperfidError, ValueError):
    pass


class PureStateSingularity(HyperfidError, ValueError):
    def __init__(self, norm: float):
        self.norm = float(norm)
        super().__init__(
            f"Bloch norm {norm!r} is too close to 1: rapidity diverges; use the closed-form route"
        )


class ConsistencyError(HyperfidError, ArithmeticError):
    """A computed quantity left its admissible range by more than round-off."""


class InvalidSpec(HyperfidError, ValueError):
    pass


class StateFileError(HyperfidError, ValueError):
    pass
