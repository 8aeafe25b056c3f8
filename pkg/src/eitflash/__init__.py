"""Transient probe transmission through two-level and Lambda EIT media.

Frequencies are in units of the excited-state linewidth ``gamma21`` and times
in units of ``1/gamma21`` throughout.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    EitflashError,
    FitError,
    GridError,
    GridMismatchError,
    MagnitudeUnderflowError,
    NoMaximumError,
    QuadratureError,
    ThresholdError,
    TruncationError,
    WrapAroundWarning,
)
from .medium import (  # noqa: E402
    DopplerMode,
    MediumParams,
    delta_pi,
    doppler_width,
    flash_time_scale,
    group_delay,
)
from .pulse import PulseKind, PulseSpec, default_square  # noqa: E402
from .propagate import (  # noqa: E402
    FieldTrace,
    SpectralGrid,
    default_grid,
    periodic_amplitude,
    sample_trace,
    steady_state,
    transmit_periodic,
    transmit_sample,
    transmit_trace,
    zero_plus,
)
from .decompose import (  # noqa: E402
    DecomposedFields,
    decompose,
    extract_phases,
    phase_difference_formula,
    steady_components,
    wrap_phase,
)
from .analysis import (  # noqa: E402
    FlashMetrics,
    FringeScan,
    ModulationMap,
    contrast_curve,
    doppler_fringe_scan,
    fast_regime_closed_form,
    first_fringe_maximum,
    fit_flash_decay,
    flash_amplitude,
    flash_decay_trace,
    fringe_metrics,
    fringe_scan,
    measure_group_delay,
    modulation_map,
)
