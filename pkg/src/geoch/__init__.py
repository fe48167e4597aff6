"""Bell inequalities built from statistical separations of events.

Subpackages by layer: ``events`` (finite event algebra), ``catalog``
(named inequalities and form converters), ``polytope`` (deterministic
vertices, facet checks), ``quantum`` (operators, states, counts) and
``violation`` (optimization over settings).
"""

from ._backend import BACKEND
from .catalog import NAMES, make_named, make_probability, make_separation
from .errors import GeochError, NumericalError, SizeError, SpaceMismatchError, UnknownInequalityError

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "NAMES", "make_named", "make_probability", "make_separation",
    "GeochError", "NumericalError", "SizeError", "SpaceMismatchError", "UnknownInequalityError",
]
