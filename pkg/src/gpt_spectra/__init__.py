"""Spectral, majorization and thermodynamic analysis of general probabilistic theories."""

from .configuration import Budgets, RunConfig, Tolerances
from .core import EffectVec, Face, Measurement, ModelKind, StateVec, SystemModel
from .errors import GPTSpectraError
from .majorization import majorizes, measurement_entropy, verify_theorem_majorization, weak_majorizes
from .models import model_from_spec
from .observables import spectral_expand, spectral_family
from .perfection import perfection_pipeline, phi_for
from .projective import build_filter, hat, tilde
from .spectral import decompose, spectral_entropy, spectrum
from .thermo import run_von_neumann

__all__ = [
    "Budgets",
    "RunConfig",
    "Tolerances",
    "EffectVec",
    "Face",
    "Measurement",
    "ModelKind",
    "StateVec",
    "SystemModel",
    "GPTSpectraError",
    "majorizes",
    "measurement_entropy",
    "verify_theorem_majorization",
    "weak_majorizes",
    "model_from_spec",
    "spectral_expand",
    "spectral_family",
    "perfection_pipeline",
    "phi_for",
    "build_filter",
    "hat",
    "tilde",
    "decompose",
    "spectral_entropy",
    "spectrum",
    "run_von_neumann",
]
