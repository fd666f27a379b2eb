"""Third-order optical response of pure-dephasing multilevel systems.

Closed-form second-cumulant R2 response functions, the interval-specific
time-local master equations that reproduce them, and 2D spectra.
"""
__version__ = "0.1.0"

from .bath import (
    CorrelationMatrix,
    LineBroadening,
    ObOLineBroadening,
    ObOParams,
    TabulatedEgcf,
    egcf_from_obo,
    g_from_egcf,
    load_egcf_csv,
    obo_g,
    obo_gdot,
)
from .cumulant import (
    PathwaySpec,
    ResponseField,
    SystemSpec,
    field_exact,
    field_rdm,
    linear_coherence,
    linear_response,
    r2_exact,
    r2_initial,
    r2_rdm,
    uniform_axis,
)
from .propagator import (
    coeff_I,
    coeff_M,
    k2,
    k3,
    propagate_first,
    propagate_second,
    propagate_third,
    r2_via_master,
)
from .spectra import absorption, compare, lineshape_metrics, spectrum2d
