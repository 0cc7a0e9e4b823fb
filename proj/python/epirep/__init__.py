"""Epigraph representations of convex Hamiltonians: conjugates, the Steiner
parameterization, value functions and tube audits."""

from ._epirep import (
    ConfigError,
    EpirepError,
    GeometryError,
    ModelError,
    NumericalError,
    closed_form_conjugate,
    config_hash,
    conjugate,
    hamiltonian,
    model_names,
    parameterize,
    run,
    steiner_point,
    subcommands,
    terminal_names,
    value,
)

__all__ = [
    "ConfigError",
    "EpirepError",
    "GeometryError",
    "ModelError",
    "NumericalError",
    "closed_form_conjugate",
    "config_hash",
    "conjugate",
    "hamiltonian",
    "model_names",
    "parameterize",
    "run",
    "steiner_point",
    "subcommands",
    "terminal_names",
    "value",
]
