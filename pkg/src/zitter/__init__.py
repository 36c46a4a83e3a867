"""Compton-scale electron dynamics driven by band-limited zero-point radiation."""

from .analysis import (
    EnsembleStats,
    TransientFit,
    ensemble_stationary_variance,
    fit_decay_rate,
    oscillations_during_transition,
    transition_time_from_fit,
)
from .constants import (
    DerivedConstants,
    FundamentalConstants,
    SimUnits,
    codata,
    derive_constants,
    from_sim_units,
    load_constants,
    sim_units,
    to_sim_units,
)
from .dynamics import (
    CharacteristicRoots,
    DiracFreeParticle,
    ExternalForceModel,
    FastMotionParams,
    Trajectory,
    canonical_momentum_residual,
    characteristic_roots,
    decompose_slow_fast,
    dirac_position_amplitude,
    dirac_velocity,
    integrate_ensemble,
    integrate_transient,
    residual_force_ratio,
    transient_envelope,
)
from .errors import ConfigError, NumericalInstabilityError
from .zpf import (
    FieldRealization,
    ModeSet,
    SpectrumModel,
    child_seeds,
    estimate_psd,
    evaluate_field,
    sed_drive_spectrum,
    sed_field_spectrum,
    synthesize_band,
    to_sim_drive,
)

__version__ = "0.1.0"
