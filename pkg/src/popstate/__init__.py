"""Population protocols and Petri nets: simulation, coverability, output stability,
bottom components, control-state cycles and state-complexity bounds."""
from .core import (
    Action,
    Configuration,
    Output,
    OutputMap,
    PetriNet,
    Protocol,
    StateSet,
    Transition,
    parse_config,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BACKEND",
    "Configuration",
    "Output",
    "OutputMap",
    "PetriNet",
    "Protocol",
    "StateSet",
    "Transition",
    "parse_config",
]
