"""Physical-layer simulator for inter-satellite optical wireless links.

Sampled-waveform block chain (PRBS source, CW laser, MZM, EDFA, vacuum
free-space channel, APD, Bessel low-pass), an eye-diagram Q/BER analyzer,
a closed-form link-budget oracle with thermal-noise calibration, and a
sweep-capable service/CLI front end.
"""
from .analysis import (
    EyeDiagram,
    QResult,
    ber_from_q,
    electrical_power_dbm,
    estimate_q,
    fold_eye,
    pool_eyes,
)
from .channel import (
    OwcParams,
    geometric_factor_linear,
    geometric_loss_db,
    pointing_loss,
    propagate,
    telescope_gain,
)
from .errors import (
    CalibrationError,
    InvalidParameterError,
    IsowcError,
    NumericError,
    ScenarioParseError,
    SimulationError,
)
from .linkbudget import (
    BudgetReport,
    analytic_metrics,
    calibrate_thermal,
    noise_equivalent_bandwidth,
)
from .receiver import (
    ApdParams,
    BesselFilterParams,
    apd_detect,
    bessel_lowpass,
    bessel_response,
    excess_noise_factor,
)
from .runner import (
    MetricsRecord,
    SweepSpec,
    make_sweep,
    run_scenario,
    run_sweep,
    simulate_pooled,
)
from .scenario import Scenario, parse_scenario, scenario_to_text
from .signals import (
    BitSequence,
    ElectricalSignal,
    NoiseFlags,
    OpticalSignal,
    SimulationGrid,
    make_grid,
    mean_optical_power_dbm,
    prbs_generate,
)
from .transmitter import (
    EdfaParams,
    LaserParams,
    MzmParams,
    ase_psd,
    cw_laser,
    edfa_amplify,
    mzm_modulate,
    nrz_drive,
)

__version__ = "0.1.0"
