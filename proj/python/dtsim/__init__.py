"""Choreography runtime, two-party protocol compiler and insecurity test."""

from ._dtsim import (
    DtsimError,
    compile_bristol,
    compile_builtin,
    generate,
    normalize,
    parties,
    test_program,
    test_views,
    views,
    wilcoxon_less,
)

__all__ = [
    "DtsimError",
    "compile_bristol",
    "compile_builtin",
    "generate",
    "normalize",
    "parties",
    "test_program",
    "test_views",
    "views",
    "wilcoxon_less",
]
