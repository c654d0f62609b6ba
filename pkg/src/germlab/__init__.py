"""germlab: exact regularity analysis for polynomial and mixed map germs."""

from germlab.poly import Polynomial, PolyMatrix, VarContext

__all__ = ["Polynomial", "PolyMatrix", "VarContext"]
__version__ = "0.1.0"
