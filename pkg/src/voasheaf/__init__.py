"""Exact computations in the vertex algebra V (x) Q(x1..xN), its gluing maps,
the loop algebra representation, and generalized Verma modules."""

from .charts import ChartError, ChartTransition, build_transition, phi
from .ratfunc import MultiPoly, ParseError, RatFunc, RatFuncError
from .vacore import ConfigError, Engine, EngineConfig, Mode, State

__all__ = [
    "ChartError",
    "ChartTransition",
    "ConfigError",
    "Engine",
    "EngineConfig",
    "Mode",
    "MultiPoly",
    "ParseError",
    "RatFunc",
    "RatFuncError",
    "State",
    "build_transition",
    "phi",
]
