"""Numerical laboratory for continued-fraction level sets.

Exact continued-fraction algebra, growth-sequence classification,
Hausdorff-dimension estimators and inequality verifiers, backed by the C++
core in cflab._core.
"""

from cflab._core import *  # noqa: F401,F403
from cflab._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
