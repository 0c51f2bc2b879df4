"""Random-normalization operators and numerical checks of casual stability."""
from .normalize import Definition, System, normalize, solve_normalizer
from .transforms import Kind, make_distribution, make_transform
from .verify import StabilityClaim, Verdict, check_stability

__version__ = "0.1.0"

__all__ = [
    "Definition", "Kind", "StabilityClaim", "System", "Verdict", "check_stability",
    "make_distribution", "make_transform", "normalize", "solve_normalizer",
]
