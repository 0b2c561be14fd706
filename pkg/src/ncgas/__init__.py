"""Thermodynamics of non-commutative fermion gases in two and three dimensions."""

__version__ = "0.1.0"

from .errors import (DomainError, KinkError, NcgasError, NoIntersectionError, QuadratureError,
                     RegimeWarning, SolverError, SommerfeldAccuracyWarning, SpectrumError,
                     TruncationError)
from .spectrum import (SpectrumTable, ThermoPoint, bessel_zeros, build_spectrum, exact_sums_2d,
                       exact_sums_3d, laguerre_zeros, load_or_build, q_exact_2d, q_exact_3d,
                       required_m_max, required_n_max)
from .density import (RescaledPoint, SupportBand, eps_bounds, fermi_intersections,
                      zero_density_scaled, zero_density_unscaled)
from .qpot2d import (q_partials, q_quadrature, q_sommerfeld, sector_integral,
                     sommerfeld_coefficients)
from .thermo2d import (Observables, Region, boundary_curves, classify_region, critical_density,
                       incompressible_scaling, near_critical_SP, observables, solve_potentials)
from .qpot3d import (Geometry3D, entropy_3d_asymptotic, high_density_constants,
                     longitudinal_cutoff, observables_3d, pressure_energy_ratio, q3d, q3d_sum,
                     solve_potentials_3d)
