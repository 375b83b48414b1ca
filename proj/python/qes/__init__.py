"""Spectra, level crossings and monodromy of the even quasi-exactly solvable sextic."""

from ._qes import (
    ConjectureViolation,
    NumericalFailure,
    cauchy_transform,
    charpoly,
    conjectured_transposition,
    critical_lambdas,
    crossings,
    crossings_json,
    density_real,
    discriminant,
    foci,
    monodromy,
    quartic_beta,
    spectrum,
    spectrum_json,
    support_interval_real,
    track,
)

__all__ = [
    "ConjectureViolation",
    "NumericalFailure",
    "cauchy_transform",
    "charpoly",
    "conjectured_transposition",
    "critical_lambdas",
    "crossings",
    "crossings_json",
    "density_real",
    "discriminant",
    "foci",
    "monodromy",
    "quartic_beta",
    "spectrum",
    "spectrum_json",
    "support_interval_real",
    "track",
]
