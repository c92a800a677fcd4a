## physicality
HERMITIAN_RTOL = 1e-12
SYMPLECTIC_TOL = 1e-9
INIT_TOL = 1e-12

## dilation
DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
NORM_TOL = 1e-8
EPS_G_REL = 1e-9
BAND_HALF_WIDTH = 20 ## in units of kappa
DEFAULT_K = 400
OHMIC_BAND_CUTOFFS = 10 ## ohmic band is [0, OHMIC_BAND_CUTOFFS * cutoff]

## production
EPS_GAMMA_REL = 1e-9
FD_STEP = 1e-5 ## in units of the natural time unit

## witnesses
EVENT_THRESHOLD = 1e-9

## scenario
DEFAULT_N_POINTS = 300
FIG1_T_MAX = 4 ## in units of 1/kappa
THREADS_ENV = "WIGNER_DILATION_THREADS"
CONFIG_ENV = "WIGDIL_CONFIG"

## bath section names
BATH_TIM = "tim"
BATH_DISCRETE = "discrete"
BATH_SPECTRAL = "spectral"
BATH_TYPES = (BATH_TIM, BATH_DISCRETE, BATH_SPECTRAL)

## spectral shapes
SHAPE_FLAT = "flat"
SHAPE_OHMIC = "ohmic"
SHAPE_LORENTZIAN = "lorentzian"
SPECTRAL_SHAPES = (SHAPE_FLAT, SHAPE_OHMIC, SHAPE_LORENTZIAN)

## CSV columns (fixed order)
CSV_COLUMNS = ("t", "re_g", "im_g", "abs_g2", "Gamma", "S_WS", "S_WE",
               "srel_S_vac", "srel_E_init", "I_SE", "Pi", "env_rate", "dI_SE_dt",
               "flux", "n_t", "I_AS", "dI_AS_dt", "int_Pi", "int_env_rate", "int_dI_SE")
