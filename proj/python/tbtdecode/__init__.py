"""Exact and approximate maximum-likelihood decoding on tail-biting trellises."""

from ._core import (  # noqa: F401
    Code,
    __version__,
    add_awgn,
    brute_force_ml,
    decode,
    make_code,
    modulate,
    run_sweep,
    selftest,
)

__all__ = [
    "Code",
    "add_awgn",
    "brute_force_ml",
    "decode",
    "make_code",
    "modulate",
    "run_sweep",
    "selftest",
]
