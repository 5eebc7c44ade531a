"""Vehicle-to-infrastructure channel simulation toolkit.

Two engines produce the same impulse-response grid: a direct per-scatterer
geometric reference and a fast 2D-convolution engine driven by a Poisson
count field.  A statistics layer estimates anchored temporal ACFs, Doppler
spectra and engine-comparison CDFs; the harness adds configs, seeding,
persistence and a CLI.
"""

__version__ = "0.1.0"

from .scene import (LIGHT_SPEED_M_PER_S, ChannelParams, GridSpec, SceneGeometry,
                    TrajectoryModel, derive_geometry, euclidean_distance,
                    isotropic_ref_gain, max_propagation_delay_s, mu_position,
                    propagation_distance)
from .levy_field import (LevyFieldRealization, ScattererSet,
                         materialize_scatterers, sample_field,
                         write_scatterers_csv)
from .direct_sim import (ImpulseResponseGrid, delay_bin_index,
                         received_power_trace, simulate_direct)
from .ambit_sim import (AccumulatorGrid, KernelMatrices, build_xmat, build_ymat,
                        conv2d_fold_accumulate, simulate_ambit, velocity_warp)
from .stats import (AcfEstimate, DopplerPsd, EmpiricalCdf, EngineComparison,
                    compare_engines, doppler_psd, narrowband_gain,
                    realization_seeds, temporal_acf)
from .harness import (ExperimentConfig, RunManifest, load_config,
                      run_simulation)

__all__ = [
    "LIGHT_SPEED_M_PER_S", "ChannelParams", "GridSpec", "SceneGeometry",
    "TrajectoryModel", "derive_geometry", "euclidean_distance",
    "isotropic_ref_gain", "max_propagation_delay_s", "mu_position",
    "propagation_distance", "LevyFieldRealization", "ScattererSet",
    "materialize_scatterers", "sample_field", "write_scatterers_csv",
    "ImpulseResponseGrid", "delay_bin_index", "received_power_trace",
    "simulate_direct", "AccumulatorGrid", "KernelMatrices", "build_xmat",
    "build_ymat", "conv2d_fold_accumulate", "simulate_ambit", "velocity_warp",
    "AcfEstimate", "DopplerPsd", "EmpiricalCdf", "EngineComparison",
    "compare_engines", "doppler_psd", "narrowband_gain", "realization_seeds",
    "temporal_acf", "ExperimentConfig", "RunManifest", "load_config",
    "run_simulation", "__version__",
]
