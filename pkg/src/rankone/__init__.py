"""
Radial harmonic analysis on rank-one harmonic manifolds.

Model spaces (real hyperbolic and Damek-Ricci), spherical functions, the
Plancherel density, spherical and Abel transforms, heat and Schrodinger
kernels, and numerical checks of the associated identities and inequalities.
"""

from .eigenfunctions import EigenfunctionError, phi, phi_profile, phi_table, set_workers
from .kernels import heat_kernel, heat_l2_norm, heat_multiplier, schrodinger_evolve
from .model_space import ModelSpace, SpaceKind, damek_ricci_space, hyperbolic_space, space_from_config
from .spectral_measure import (
    CalibrationError,
    ExtractionError,
    PlancherelData,
    build_plancherel,
    calibrate_C0,
    extract_c,
    plancherel_density,
)
from .transforms import (
    RadialFunction,
    SpectralFunction,
    TransformError,
    abel_transform,
    convolve_radial,
    from_callable,
    from_samples,
    gaussian,
    inverse_ft,
    lp_norm,
    spherical_ft,
)
from .verifiers import CHECKS, VerificationReport, run_check

__version__ = "0.1.0"

__all__ = [
    "CHECKS",
    "CalibrationError",
    "EigenfunctionError",
    "ExtractionError",
    "ModelSpace",
    "PlancherelData",
    "RadialFunction",
    "SpaceKind",
    "SpectralFunction",
    "TransformError",
    "VerificationReport",
    "abel_transform",
    "build_plancherel",
    "calibrate_C0",
    "convolve_radial",
    "damek_ricci_space",
    "extract_c",
    "from_callable",
    "from_samples",
    "gaussian",
    "heat_kernel",
    "heat_l2_norm",
    "heat_multiplier",
    "hyperbolic_space",
    "inverse_ft",
    "lp_norm",
    "phi",
    "phi_profile",
    "phi_table",
    "plancherel_density",
    "run_check",
    "schrodinger_evolve",
    "set_workers",
    "space_from_config",
    "spherical_ft",
]
