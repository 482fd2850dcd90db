"""Numerical verification toolkit for superintegrable systems on the Darboux space D1."""

from . import (brackets, charts, dynamics, embeddings, errors, jets, kernels, operators, phase,
               specfun, spectra)
from .kernels import BACKEND
from .phase import ModelSpec, PhasePoint

__version__ = "0.1.0"

__all__ = ["BACKEND", "ModelSpec", "PhasePoint", "brackets", "charts", "dynamics", "embeddings",
           "errors", "jets", "kernels", "operators", "phase", "specfun", "spectra"]
