"""Finite-temperature Lifshitz force between coated bodies.

Drude and tabulated dielectric models, the Matsubara-summed plate and
sphere-plate forces (proximity force theorem), Drude fitting of infrared
optical data and residual analysis of measured force curves.
"""

from casimir.constants import CODATA2018, PhysicalConstants
from casimir.dielectric import (
    DrudeModel,
    DrudeParams,
    ExtrapolationPolicy,
    IdealMetal,
    MaterialComposition,
    OpticalTable,
    TabulatedModel,
    damping_from_resistivity,
    drude_eps_imag_axis,
    drude_eps_real_axis,
    kk_eps_imag_axis,
    plasma_frequency,
    resistivity_spectrum,
)
from casimir.drude_fit import FitResult, FitWindow, fit_drude
from casimir.errors import (
    CasimirError,
    ConvergenceError,
    ExtrapolationError,
    InputError,
    NumericalError,
    TruncationError,
)
from casimir.lifshitz import (
    ForceJob,
    ForceResult,
    Layer,
    LayerStack,
    QuadratureSpec,
    ThermalSpec,
    ideal_casimir_pressure,
    matsubara_frequency,
    pft_consistency_check,
    plate_pressure,
    reflection_factors_homogeneous,
    reflection_factors_layered,
    sphere_plate_force,
)

__version__ = "0.1.0"
