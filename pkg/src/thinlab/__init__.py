"""thinlab: a desk-scale laboratory for error-detecting bit codes,
thin sets, two-player word games and parity partitions of the cube."""

__version__ = "0.1.0"

from .bits import (  # noqa: F401
    OMEGA,
    EventuallyConstant,
    EventuallyPeriodic,
    ExtendedNat,
    Generated,
    Stream,
    Word,
    all_words,
    approx_related,
    bit_k,
    flip,
    hd,
    hd_prefix,
    popcount,
    sim_related,
    theta,
)
