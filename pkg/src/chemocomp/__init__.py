"""Two-species chemotaxis-competition solver and condition toolkit."""
from .model import (Domain, FieldState, ModelParams, Regime, SteadyState, classify_regime,
                    validate_params)

__all__ = ["Domain", "FieldState", "ModelParams", "Regime", "SteadyState", "classify_regime",
           "validate_params"]
__version__ = "0.1.0"
