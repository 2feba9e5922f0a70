"""Exact computations with quasi-Jacobi and Dixmier pairs.

The package works with truncated Puiseux-Laurent series in x and y over the
rationals (:mod:`jacpair.series`) and builds Newton-polygon geometry,
Poisson-bracket operations, series expansions, the two normalization stages
and Weyl-algebra arithmetic on top of them.  :mod:`jacpair.verifier` is a
small exact rewriting engine for parametric identities, and :mod:`jacpair.cli`
runs fixture batches.
"""

from .errors import JacpairError
from .series import Series, Space, from_text, to_text
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = ["JacpairError", "Series", "Space", "Verdict", "from_text", "to_text", "__version__"]
