"""Exact truncated hbar-adic formal-series calculus.

The package provides, bottom up: an exact rational base ring truncated
in hbar (`scalars`), Laurent/rational series calculus with directed
expansions and delta distributions (`series`), difference operators in
both operator pictures (`shiftops`), generalized Cartan matrix data and
structure functions (`cartan`), the deformation-tuple group with its
distinguished member (`tau`), the generator-level Yang-Baxter operator
(`smatrix`), classical affine Fock modules (`classical`), the quantum
Heisenberg Fock module (`qheisenberg`), and a batch verification runner
(`cli`).  Everything is exact: no floating point enters any computation,
and every identity check states the truncation window it verified.
"""

from .config import Context, WindowOverflowError
from .rat import Q

__all__ = ["Context", "WindowOverflowError", "Q"]
__version__ = "0.1.0"
