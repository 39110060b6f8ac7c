"""Finite models of multiple ergodic averages.

Gowers norms and progression forms on Z/NZ, cube measures and the
associated seminorms on finite ergodic systems, and multiple averages along orbits of
two explicit 2-step nilsystems.
"""

from .errors import BudgetExceeded, ContractViolation, ErgolabError, InputError
from .harmonic import (CyclicGroup, FourierCoefficients, GroupFunction, fourier_transform,
                       group_function_from_csv, group_function_to_csv, inverse_fourier_transform)
from .gowers import (VertexFamily, gowers_inner_product, gowers_norm, gowers_norm_closed,
                     gowers_norm_recursive, u2_via_fourier)
from .progressions import APReport, ProgressionForm, ap_form, ap_form_fft3, count_aps, von_neumann_gap
from .nilmanifolds import (GOLDEN, CesaroSeries, HeisenbergElement, HeisenbergPoint, HeisenbergSystem,
                           SkewPoint, SkewSystem, birkhoff_series, reduce_mod_lattice)
from .cube_measures import (CubeMeasure, FiniteSystem, build_cube_measure, hk_seminorm,
                            hk_seminorm_recursive)
from .averages import (IntegerPolynomial, OrbitSource, cubic_average, linear_average,
                       polynomial_average)

__version__ = "0.1.0"
