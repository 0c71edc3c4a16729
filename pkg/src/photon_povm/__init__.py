"""Single-photon position, spin and helicity observables for Gaussian states.

Closed forms (:mod:`closedform`) and an independent quadrature oracle
(:mod:`quadrature`, :mod:`povm`) are provided side by side so that every
analytic result can be checked numerically.
"""
from .closedform import (heis_010, heis_100, k_matrix, pol_sz_distribution, pol_uncertainty,
                         pol_uncertainty_exact, spin_moment_table, spin_sz_distribution,
                         spin_uncertainty)
from .errors import (DegenerateFrame, DomainError, InvalidParam, PhotonPovmError, RegimeMismatch,
                     ToleranceNotMet, VanishingProjection, ZeroMomentum)
from .extremize import x_axis_extremes, z_axis_extremes
from .povm import (moments_and_uncertainty, position_spin_density, prob_helicity,
                   prob_momentum_spin, prob_spin_n)
from .quadrature import QuadratureSpec, gaussian_moment, photon_inner_product, position_wavefunction
from .specfun import dawson, u_functions
from .states import (GAMMA_MINUS, GAMMA_PLUS, GaussianPolState, GaussianSpinState, make_pol_state,
                     project_spin_state)

__version__ = "0.1.0"
