"""Exact tensor-rank certificates for persistent tensors and their degenerations."""

__version__ = "0.1.0"

from .decompositions import Decomposition, decompose_l, decompose_m, verify_decomposition
from .families import dicke, ghz, l_state, m_state, mprime_state, n_state, nonsym4, nprime_state, state, w_state
from .scalars import Cyclotomic, EpsLaurent, parse_scalar
from .tensor import LocalMap, Tensor, build_tensor, kronecker_product, tensor_product

__all__ = [
    "Cyclotomic",
    "Decomposition",
    "EpsLaurent",
    "LocalMap",
    "Tensor",
    "build_tensor",
    "decompose_l",
    "decompose_m",
    "dicke",
    "ghz",
    "kronecker_product",
    "l_state",
    "m_state",
    "mprime_state",
    "n_state",
    "nonsym4",
    "nprime_state",
    "parse_scalar",
    "state",
    "tensor_product",
    "verify_decomposition",
    "w_state",
]
