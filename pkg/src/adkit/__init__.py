"""Scalar automatic differentiation kit.

Forward mode with dual numbers, reverse mode on a tape, nested
derivatives and Hessian-vector products, a finite-difference baseline,
and the Helmholtz gradient-cost benchmark.
"""
from . import elementary
from ._backend import NAME as BACKEND
from ._state import counters
from .dual import Dual, dual_arith, dual_elem, grad_forward, jacobian_forward, jvp, lift_const, seed_var
from .errors import DomainError, PerturbationConfusionError, TapeError
from .nest import derivative, hessian, hvp, nth_derivative
from .numdiff import DiffScheme, central_diff, error_curve, forward_diff, grad_numeric
from .opkind import OpKind
from .tape import (
    Tape,
    TapeNode,
    Var,
    dump,
    grad_reverse,
    jacobian_reverse,
    record,
    reverse_sweep,
    tape_new,
    tape_nodes,
    tape_var,
    vjp,
)

__all__ = [
    "BACKEND", "counters", "elementary",
    "Dual", "dual_arith", "dual_elem", "grad_forward", "jacobian_forward", "jvp",
    "lift_const", "seed_var",
    "DomainError", "PerturbationConfusionError", "TapeError",
    "derivative", "hessian", "hvp", "nth_derivative",
    "DiffScheme", "central_diff", "error_curve", "forward_diff", "grad_numeric",
    "OpKind",
    "Tape", "TapeNode", "Var", "dump", "grad_reverse", "jacobian_reverse", "record",
    "reverse_sweep", "tape_new", "tape_nodes", "tape_var", "vjp",
]
