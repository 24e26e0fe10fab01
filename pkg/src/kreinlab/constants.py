"""Central tolerance table.

Every numeric tolerance used by the library is defined here so that the
defaults quoted in the docs have a single source of truth.
"""

# dense symmetric eigensolver
JACOBI_SWEEP_BUDGET = 30          # sweeps before giving up (ill-conditioning signal)
EIGEN_RESIDUAL_RTOL = 1e-10       # ||A v - w v|| <= rtol * ||A|| per pair
JACOBI_AUTO_DIM = 512             # auto backend: Jacobi up to here, LAPACK above
JACOBI_AUTO_DIM_FALLBACK = 96     # same cutoff when only the pure-Python kernel exists

# ODE integration
ODE_REL_TOL = 1e-11               # Richardson step-halving target (endpoint, relative)
ODE_MAX_STEPS = 1 << 21

# root finding
ROOT_RTOL = 1e-10                 # bracket refinement, relative
ROOT_SCAN_PER_UNIT = 64           # default scan density (anti-missed-root knob)

# quadrature
QUAD_REL_TOL = 1e-11              # panel-doubling target
QUAD_MAX_PANELS = 1 << 14

# interval problems
WRONSKIAN_RTOL = 1e-9
DTN_SYMMETRY_TOL = 1e-9
HARMONIC_RESIDUAL_TOL = 1e-8
GREEN_IDENTITY_TOL = 1e-8
RESOLVENT_RESIDUAL_TOL = 1e-7
SHIFT_TARGET_LAMBDA1 = 1.0        # positivity shift aims at lambda_1(A_gamma) >= 1

# extensions / pipelines
PIPELINE_AGREE_TOL = 1e-6
KREIN_RESOLVENT_TOL = 1e-6
DTN_DIFFERENCE_TOL = 1e-7
PROJECTION_RESIDUAL_TOL = 1e-6
REDUCTION_POLE_GAP = 1e-6         # half-width of the excluded window around lambda = a

# grid model
GRID_SUM_TOL = 1e-10
GRID_INVERSE_TOL = 1e-9
GRID_ZERO_GUARD = 1e-12           # |x| guard before mapping inverse eigenvalues

# spectral toolkit
KYFAN_RTOL = 1e-10
SHIFT_ROUNDTRIP_TOL = 1e-12
SHIFT_POLE_GUARD = 1e-9
