"""Permanents of 0-1 matrices with algebraic decision diagrams."""

from ._addperm import (
    GenerationError,
    LimitError,
    Matrix01,
    NodeBudgetError,
    ParseError,
    TimeoutError,
    encode_dimacs,
    generate,
    has_perfect_matching,
    parse_dense,
    parse_matrix_market,
    perm,
    perm_brute_force,
    perm_early_abstraction,
    perm_identical_rows,
    perm_monolithic,
    perm_ryser_gray,
    read_matrix_file,
)

__all__ = [
    "GenerationError",
    "LimitError",
    "Matrix01",
    "NodeBudgetError",
    "ParseError",
    "TimeoutError",
    "encode_dimacs",
    "generate",
    "has_perfect_matching",
    "parse_dense",
    "parse_matrix_market",
    "perm",
    "perm_brute_force",
    "perm_early_abstraction",
    "perm_identical_rows",
    "perm_monolithic",
    "perm_ryser_gray",
    "read_matrix_file",
]
