"""Monte Carlo simulator and evaluation suite for nonlinear resistive
crossbar PUFs with a hidden-challenge second stage."""

from .device import (
    BOLTZMANN_EV,
    CellState,
    DeviceParams,
    Environment,
    ReRAMCell,
    cell_current,
    current_law,
    sample_cell,
)
from .crossbar import (
    CrossbarArray,
    Selection,
    SumStats,
    build_array,
    cell_current_stats,
    combine_stats,
    row_current,
)
from .core import (
    Challenge,
    ComparatorParams,
    EvalOutcome,
    PowerParams,
    PufInstance,
    crp_count,
    derive_instance_seed,
    evaluate_bit,
    evaluate_grid,
    expand_batch,
    expand_challenge,
    make_instance,
    msal_compare,
    pack_selection,
    pelgrom_offset,
)
from .experiments import (
    ExperimentConfig,
    Report,
    experiment_words,
    load_config,
    load_instance,
    run_experiment,
    run_metrics_suite,
    run_reliability_sweep,
    run_sac_experiment,
    run_snr_sweep,
    save_instance,
    standard_conditions,
    write_report,
)
from .metrics import (
    ResponseRecord,
    SacMap,
    bit_aliasing,
    bit_error_rate,
    diffuseness,
    mean_bit_aliasing,
    mean_bit_error_rate,
    mean_diffuseness,
    mean_uniformity,
    noise_free_variant,
    reliability,
    sac_challenge_test,
    sac_map,
    uniformity,
    uniqueness,
)
from .power import PowerTrace, collect_traces, snr, trace_to_csv
from .streams import EvalStream

__version__ = "0.1.0"

__all__ = [
    "BOLTZMANN_EV",
    "CellState",
    "Challenge",
    "ComparatorParams",
    "CrossbarArray",
    "DeviceParams",
    "Environment",
    "EvalOutcome",
    "EvalStream",
    "ExperimentConfig",
    "PowerParams",
    "PowerTrace",
    "PufInstance",
    "ReRAMCell",
    "Report",
    "ResponseRecord",
    "SacMap",
    "Selection",
    "SumStats",
    "bit_aliasing",
    "bit_error_rate",
    "build_array",
    "cell_current",
    "cell_current_stats",
    "collect_traces",
    "combine_stats",
    "crp_count",
    "current_law",
    "derive_instance_seed",
    "diffuseness",
    "evaluate_bit",
    "evaluate_grid",
    "expand_batch",
    "expand_challenge",
    "experiment_words",
    "load_config",
    "load_instance",
    "make_instance",
    "mean_bit_aliasing",
    "mean_bit_error_rate",
    "mean_diffuseness",
    "mean_uniformity",
    "msal_compare",
    "noise_free_variant",
    "pack_selection",
    "pelgrom_offset",
    "reliability",
    "row_current",
    "run_experiment",
    "run_metrics_suite",
    "run_reliability_sweep",
    "run_sac_experiment",
    "run_snr_sweep",
    "sac_challenge_test",
    "sac_map",
    "sample_cell",
    "save_instance",
    "snr",
    "standard_conditions",
    "trace_to_csv",
    "uniformity",
    "uniqueness",
    "write_report",
]
