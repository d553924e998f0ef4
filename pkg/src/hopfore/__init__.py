"""Weight modules over the Hopf-Ore extension kG(chi^-1, a, 0).

Exact cyclotomic arithmetic, explicit matrix realizations of the
indecomposables, closed-form tensor rules, an independent matrix oracle, and
Green ring computations on top of both.
"""

from .exactfield import CycNum, root_of_unity
from .hopfdata import Case, Character, GroupSpec, HopfParams
from .weightmods import Decomposition, NilLabel, NonNilLabel, nonnil

__all__ = ["CycNum", "root_of_unity", "Case", "Character", "GroupSpec", "HopfParams",
           "Decomposition", "NilLabel", "NonNilLabel", "nonnil"]
__version__ = "0.1.0"
