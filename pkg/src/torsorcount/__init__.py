"""Integral points of bounded height on the blow-up of P^3 in a conic.

Exact torsor-point counts N_1(B), N_2(B) together with an independent
computation of every factor of the predicted leading constants.
"""
from .cox import CoxPoint, DivisorTag, Monomial, PicDegree, cox_degree, height, is_torsor_point
from .enumeration import CountResult, count_N1, count_N2, count_grid, oracle_count
from .kernels import BACKEND

__all__ = [
    "BACKEND",
    "CountResult",
    "CoxPoint",
    "DivisorTag",
    "Monomial",
    "PicDegree",
    "count_N1",
    "count_N2",
    "count_grid",
    "cox_degree",
    "height",
    "is_torsor_point",
    "oracle_count",
]
__version__ = "0.1.0"
