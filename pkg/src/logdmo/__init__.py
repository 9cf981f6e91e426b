"""Log-stretch frequency-wavenumber dip moveout for common-offset sections."""

from .fk import Section, SingularPolicy, Spectrum
from .kernel import FkPoint, OperatorKind, PhaseResult, Validity, evaluate
from .pipeline import DmoConfig, impulse_response, run_dmo
from .stretch import StretchedTrace, Trace

__all__ = [
    "DmoConfig",
    "FkPoint",
    "OperatorKind",
    "PhaseResult",
    "Section",
    "SingularPolicy",
    "Spectrum",
    "StretchedTrace",
    "Trace",
    "Validity",
    "evaluate",
    "impulse_response",
    "run_dmo",
]

__version__ = "0.1.0"
