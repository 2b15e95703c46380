"""Error hierarchy shared by every metastab module."""


class MetastabError(Exception):
    """Base class; the CLI maps any subclass to exit code 1."""


class DegenerateInputError(MetastabError, ValueError):
    pass


class GeometryError(MetastabError):
    pass


class ProjectionError(GeometryError):
    def __init__(self, point, iterations: int) -> None:
        super().__init__(f"closest-point projection of {list(point)} did not converge in {iterations} iterations")
        self.point = point
        self.iterations = iterations


class CollarError(GeometryError):
    pass


class SingularJacobianError(GeometryError):
    def __init__(self, point, determinant: float) -> None:
        super().__init__(f"singular Jacobian at {list(point)} (det = {determinant:.3e})")
        self.point = point
        self.determinant = determinant


class NonConvexSurfaceError(GeometryError):
    pass


class MaterialError(MetastabError):
    pass


class NonEllipticMaterialError(MaterialError):
    def __init__(self, name: str, point, min_eigenvalue: float) -> None:
        super().__init__(f"{name} is not uniformly elliptic at {list(point)} (lambda_min = {min_eigenvalue:.3e})")
        self.name = name
        self.point = point
        self.min_eigenvalue = min_eigenvalue


class MaterialStructureError(MaterialError):
    pass


class SpecialFunctionError(MetastabError, ArithmeticError):
    pass


class QuadratureError(MetastabError):
    def __init__(self, message: str, error_estimate: float) -> None:
        super().__init__(message)
        self.error_estimate = error_estimate


class SupportError(MetastabError):
    pass


class ResonantModeError(MetastabError):
    def __init__(self, n: int, polarization: str, denominator: complex) -> None:
        super().__init__(f"resonant mode n={n} {polarization}: |denominator| = {abs(denominator):.3e}")
        self.n = n
        self.polarization = polarization
        self.denominator = denominator


class IdentityDegenerateError(MetastabError):
    pass


class ConfigError(MetastabError):
    """Run configuration that cannot be read or does not match the invoked command."""
