"""gencurate: quantitatively near-optimal, qualitatively diverse curation.

Generate small sets of candidate actions that score well on a known
quantitative objective while staying diverse under a kernel model of
unobservable qualitative taste, then refine the taste belief from human
pairwise preferences.
"""

from ._inner import backend_name
from .kernels import Kernel
from .objective import CurationObjectiveParams, expected_max_gaussian
from .spaces import BinarySpace, BoxSpace

__version__ = "0.1.0"

__all__ = [
    "BinarySpace",
    "BoxSpace",
    "CurationObjectiveParams",
    "Kernel",
    "backend_name",
    "expected_max_gaussian",
    "__version__",
]
