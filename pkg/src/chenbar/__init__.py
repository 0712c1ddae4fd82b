"""Exact unipotent non-abelian Hodge computations on square complex tori."""

from .bar import (BarElement, d_C, d_I, ideal_I, invariant_space, pairing_matrix,
                  symmetrize)
from .chen import PathWord, integrate_algebra, integrate_path, integrate_segment, parse_path
from .connection import (Connection, check_flat, factors_through, monodromy,
                         monodromy_on_algebra, parse_connection, render_connection,
                         simpson_split, sub_quotient, verify_theorems)
from .exact import ExactMatrix, GaussianRational, Subspace, kernel, parse_scalar, rref
from .group_algebra import GroupAlgebraElement, augmentation, embed, j_power, multiply
from .torus import Letter, OneForm, TorusSpace, parse_form, period, type_split, wedge

__version__ = "0.1.0"

__all__ = [
    "BarElement", "d_C", "d_I", "ideal_I", "invariant_space", "pairing_matrix", "symmetrize",
    "PathWord", "integrate_algebra", "integrate_path", "integrate_segment", "parse_path",
    "Connection", "check_flat", "factors_through", "monodromy", "monodromy_on_algebra",
    "parse_connection", "render_connection", "simpson_split", "sub_quotient", "verify_theorems",
    "ExactMatrix", "GaussianRational", "Subspace", "kernel", "parse_scalar", "rref",
    "GroupAlgebraElement", "augmentation", "embed", "j_power", "multiply",
    "Letter", "OneForm", "TorusSpace", "parse_form", "period", "type_split", "wedge",
]
