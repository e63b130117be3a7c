"""Exchange-assisted tunneling in a 1D double well.

A compact laboratory for one question: when a second particle occupies a
high orbital, the non-local exchange term lets the ground particle reach
the other well with only power-law suppression, while bare tunneling dies
exponentially.  Perturbative and mean-field amplitudes are implemented
alongside an exact two-particle diagonalization that arbitrates.
"""

from .analysis import FitResult, ScanRow, ScanTable, crossover, fit_exponential, fit_power, scan
from .eigen import EigenPair, LinearOperator, hamiltonian_operator, lowest_eigenpairs, shifted_solve
from .errors import (ComputationError, ConfigError, ConvergenceError, GridMismatchError,
                     NearSingularShiftError, RegimeError)
from .exchange import (CoherenceReport, CoulombElement, ExchangeField, coherence_projection,
                       coulomb_matrix_element, exchange_distance_scan, exchange_source, node_count)
from .hartree_fock import EscapeResult, HFMixResult, solve_hf_mixing, tail_profile, wide_b_escape
from .model import (DoubleWellSpec, Grid, InteractionKernel, build_grid, kernel_apply,
                    kernel_matrix, kernel_value, sample_potential, symmetric_wells)
from .single_particle import (LocalizedPair, Orbital, localize_doublet, localized_levels,
                              make_orbital, perturbative_mixing_direct, potential_function,
                              solve_wells, wkb_exponent)
from .two_particle import (IdentificationError, ReducedDensity, StrongCouplingResult,
                           TwoBodySpace, TwoBodyState, build_two_body, find_state_by_config,
                           one_body_rdm, solve_two_body, strong_coupling_amplitude,
                           two_body_space, well_b_occupation)

__version__ = "0.1.0"
