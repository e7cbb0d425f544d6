"""Weak covering and quantization of the cube and simplex by non-lattice designs.

The main entry points are

* :mod:`weakcover.designs` for point designs (Beta-scattered points, random
  vertices, Sobol points, minimum-aberration fractional factorials and
  simplex designs), all scaled by a parameter ``delta``;
* :mod:`weakcover.approx` and :mod:`weakcover.quantize` for the CLT-based
  coverage and quantization approximations;
* :mod:`weakcover.montecarlo` for seeded, thread-count independent Monte Carlo
  estimates;
* :mod:`weakcover.tuner`, :mod:`weakcover.tables` and
  :mod:`weakcover.simplexlab` for tuning ``delta`` and reproducing experiments.
"""

from .approx import coverage_approx, coverage_exact_product, equivalent_m, p_ball
from .designs import DesignSpec, generate
from .estimators import (
    BetaDesign,
    DeltaTuner,
    DesignQuantizer,
    FactorialDesign,
    SimplexDesign,
    SobolDesign,
    VertexDesign,
)
from .geometry import Cube, PointSet, Simplex, covering_radius_factorial
from .moments import eta_moments
from .montecarlo import McConfig, McEstimate, mc_coverage, mc_quantile_radius, mc_quantization
from .quantize import quant_density, quant_error
from .tuner import TuneResult, optimal_delta_for_coverage, optimal_delta_for_quantization, radius_for_coverage

__version__ = "0.1.0"

__all__ = [
    "BetaDesign",
    "Cube",
    "DeltaTuner",
    "DesignQuantizer",
    "DesignSpec",
    "FactorialDesign",
    "McConfig",
    "McEstimate",
    "PointSet",
    "Simplex",
    "SimplexDesign",
    "SobolDesign",
    "TuneResult",
    "VertexDesign",
    "coverage_approx",
    "coverage_exact_product",
    "covering_radius_factorial",
    "equivalent_m",
    "eta_moments",
    "generate",
    "mc_coverage",
    "mc_quantile_radius",
    "mc_quantization",
    "optimal_delta_for_coverage",
    "optimal_delta_for_quantization",
    "p_ball",
    "quant_density",
    "quant_error",
    "radius_for_coverage",
]
