"""Search for terminal Fano hypersurfaces on the integer weight lattice.

The package is organised around a combinatorial terminality oracle
(:mod:`fanosearch.oracle`) and three search engines that consume it:
an exhaustive sweep, a fixed-heuristic best-first search
(:mod:`fanosearch.engines`) and a value-network-guided stochastic search
(:mod:`fanosearch.rl`).  Post-hoc reachability analysis lives in
:mod:`fanosearch.analysis`; persistence and the command line in
:mod:`fanosearch.records`, :mod:`fanosearch.grdb` and :mod:`fanosearch.cli`.
"""

from fanosearch.lattice import (
    count_ball_cone,
    count_ball_halfspace,
    in_cone,
    l1_distance,
    neighbors,
)
from fanosearch.oracle import (
    Classification,
    FanoOracle,
    SingularityType,
    Verdict,
    classify,
    degree_of,
    is_quasismooth,
    is_well_formed,
    mori_terminal_approx,
    rst_terminal,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "FanoOracle",
    "SingularityType",
    "Verdict",
    "classify",
    "count_ball_cone",
    "count_ball_halfspace",
    "degree_of",
    "in_cone",
    "is_quasismooth",
    "is_well_formed",
    "l1_distance",
    "mori_terminal_approx",
    "neighbors",
    "rst_terminal",
    "__version__",
]
