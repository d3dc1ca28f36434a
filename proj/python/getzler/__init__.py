"""Getzler rescaling toolkit (Python bindings)."""

from ._core import (
    InputError,
    bergman_leading,
    bergman_sweep,
    cli,
    landau_trace,
    lattice_heat_trace,
    mehler_kernel,
    odd_leading,
    odd_sweep,
    run_criterion,
    series_oracle,
    series_oracle_names,
    volume_supertrace,
)

__all__ = [
    "InputError",
    "bergman_leading",
    "bergman_sweep",
    "cli",
    "landau_trace",
    "lattice_heat_trace",
    "mehler_kernel",
    "odd_leading",
    "odd_sweep",
    "run_criterion",
    "series_oracle",
    "series_oracle_names",
    "volume_supertrace",
]
