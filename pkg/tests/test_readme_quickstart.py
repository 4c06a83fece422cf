"""The README quick-start block must run as written."""

import math


def test_quickstart_block():
    from pattern_entropy import (ParamVector, build_grid, exact_entropies,
                                 simple_bounds, ub_theorem3_family)

    theta = ParamVector.from_probs([0.08, 0.17, 0.3, 0.45])
    n = 6
    grid = build_grid("eta", n, 0.2)
    exact = exact_entropies(theta, grid, n)
    lo, hi = simple_bounds(theta, n)
    ub = ub_theorem3_family(theta, n, 0.2, "ub3")
    assert lo.value <= exact.h_pattern <= hi.value
    assert ub.value == math.fsum(t for _, t in ub.terms)
