"""Exception types shared across the package."""


class CayleyGraphError(Exception):
    """Base class. `code` is a short machine-readable tag used in report records."""

    code = "error"


class SingularPoint(CayleyGraphError):
    code = "singular_point"


class DegreeCapExceeded(CayleyGraphError):
    code = "degree_cap"


class EigensolveFailure(CayleyGraphError):
    code = "eigensolve"


class FrameDegenerate(CayleyGraphError):
    code = "frame_degenerate"


class ComplexPoint(CayleyGraphError):
    code = "complex_point"


class NearComplex(CayleyGraphError):
    code = "near_complex"


class NearLagrangian(CayleyGraphError):
    code = "near_lagrangian"


class StencilOutOfDomain(CayleyGraphError):
    code = "stencil_out_of_domain"


class QuadratureNonConvergent(CayleyGraphError):
    code = "quadrature"


class ConfigError(CayleyGraphError):
    code = "config"
