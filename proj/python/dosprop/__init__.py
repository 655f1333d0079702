"""Difference-of-slopes (DOS) estimation of the false-null proportion.

Functions accept any sequence of p-values (lists, tuples, 1-d numpy arrays)
and return plain dicts. Invalid input raises DosPropError, a ValueError.
"""

from ._dosprop import (
    DosPropError,
    adaptive_bh,
    bh,
    dos_changepoint,
    dos_sequence,
    dos_storey,
    generate,
    ideal_changepoint,
    jd,
    lsl,
    run_config,
    st_median,
    storey,
    udos,
)

__all__ = [
    "DosPropError",
    "adaptive_bh",
    "bh",
    "dos_changepoint",
    "dos_sequence",
    "dos_storey",
    "generate",
    "ideal_changepoint",
    "jd",
    "lsl",
    "run_config",
    "st_median",
    "storey",
    "udos",
]
