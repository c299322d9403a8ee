"""N-well lattice reduction of the nonlinear Schrodinger equation.

Public surface: lattice spectra (closed form and numeric), conservative
N-mode dynamics, stationary-state solving across sign families,
continuation with fold/pitchfork detection, large-nonlinearity
localization asymptotics, and the 1D linear eigensolver cross-check.
"""

from .branches import BifurcationEvent, Branch, BranchPoint
from .continuation import (
    StepControl,
    asymptotic_localized_seed,
    continue_branch,
    detect_folds,
    detect_pitchfork_and_classify,
    ground_state_bifurcation_table,
)
from .dynamics import (
    ActionAngleState,
    ModeState,
    ReducedState,
    Trajectory,
    action_angle_rhs,
    hamiltonian,
    hamiltonian_gradients,
    integrate,
    mode_energy,
    reduce_state,
    reduced_hamiltonian,
    rhs_nmode,
    to_action_angle,
    to_modes,
)
from .errors import (
    AccuracyWarning,
    DedupAmbiguityWarning,
    NearBifurcationError,
    NumericError,
    ParameterError,
    RegimeWarning,
    SolverError,
    StateError,
)
from .lattice import (
    CouplingMatrix,
    ModeBasis,
    build_graph_coupling,
    build_line_coupling,
    closed_form_spectrum,
    diagonalize_symmetric,
)
from .linear1d import (
    CosineFit,
    GridFunction,
    HoppingEstimate,
    NWellSpectrum,
    Spectrum1D,
    Well1D,
    compare_lemma2,
    dirichlet_ground_state,
    hopping_beta_formula,
    mode_overlap_matrix,
    nwell_spectrum_direct,
    run_crosscheck,
)
from .params import ModelParams, nonlinear_coefficients
from .stationary import (
    DEFAULT_MULTISTART_SEED,
    AmplitudeSolution,
    SignPattern,
    enumerate_solutions,
    family_amplitudes,
    gauge_flip,
    mirror_image,
    newton_solve,
    scaled_energy,
    solve_family_at_eta,
    staggered_image,
    stationary_jacobian,
    stationary_residual,
    sweep_symmetric,
    symmetric_family_fourwell,
)

__version__ = "0.1.0"
