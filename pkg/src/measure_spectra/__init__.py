"""Spectra and regularized traces of -y'' + q y with measure potentials."""
__version__ = "0.1.0"

from .bcspec import BoundaryConditions, CaseTag, Regularity, classify, trace_coefficients  # noqa: E402
from .measure import SignedMeasure  # noqa: E402
from .spectrum import Spectrum, spectrum  # noqa: E402

__all__ = [
    "BoundaryConditions",
    "CaseTag",
    "Regularity",
    "SignedMeasure",
    "Spectrum",
    "classify",
    "spectrum",
    "trace_coefficients",
]
