"""Time-fractional phase-field solver: fast Caputo evaluation, stabilized
spectral stepping for conserved and thin-film models, and power-law exponent
fitting. The heavy lifting lives in the compiled extension; this package
re-exports its public surface."""

from ._fracpf import (
    FracpfConfigError,
    FracpfDivergenceError,
    FracpfIoError,
    PowerLawFit,
    RunArtifacts,
    RunConfig,
    SoeBuildError,
    SoeKernel,
    SweepResult,
    SweepRow,
    __version__,
    build_soe,
    caputo_monomial,
    caputo_trajectory,
    default_config,
    fit_power_law,
    l1_caputo,
    load_config,
    parse_config,
    read_series,
    read_snapshot,
    run_single,
    run_sweep,
    seeded_field,
    soe_eval,
)

__all__ = [
    "FracpfConfigError",
    "FracpfDivergenceError",
    "FracpfIoError",
    "PowerLawFit",
    "RunArtifacts",
    "RunConfig",
    "SoeBuildError",
    "SoeKernel",
    "SweepResult",
    "SweepRow",
    "__version__",
    "build_soe",
    "caputo_monomial",
    "caputo_trajectory",
    "default_config",
    "fit_power_law",
    "l1_caputo",
    "load_config",
    "parse_config",
    "read_series",
    "read_snapshot",
    "run_single",
    "run_sweep",
    "seeded_field",
    "soe_eval",
]
