"""Kahler angles, Cayley calibration and curvature of graph 4-folds in flat R^8."""
from .calibration import CayleyVariant, calibration_defect, omega_triangle
from .catalog import build, catalog_entries, get_entry
from .curvature import CurvaturePackage, curvature_package, eta_form, nabla_phi, second_fundamental_form
from .geometry import PointClass, PointGeometry, angle_coefficients, point_geometry
from .jets import ImmersionSpec, Jet3, evaluate_jet, finite_difference_jet, polynomial_spec
from .tolerances import DEFAULT_TOL, Tolerances

__version__ = "0.1.0"

__all__ = [
    "CayleyVariant", "CurvaturePackage", "DEFAULT_TOL", "ImmersionSpec", "Jet3", "PointClass",
    "PointGeometry", "Tolerances", "angle_coefficients", "build", "calibration_defect",
    "catalog_entries", "curvature_package", "eta_form", "evaluate_jet", "finite_difference_jet",
    "get_entry", "nabla_phi", "omega_triangle", "point_geometry", "polynomial_spec",
    "second_fundamental_form",
]
