"""Crossmodal metric-learning toolkit.

Trains a target-modality embedding on the unit hypersphere with triplet
losses, regularized by a frozen source-modality embedding through target,
relative-distance, or clustering-structure transfer, and evaluates with
verification, clustering, and retrieval metrics.
"""

from xmodal._core import *  # noqa: F401,F403
from xmodal._core import __doc__ as _core_doc  # noqa: F401
