"""Sweep the alphabet-size range bound: how much must pattern entropy drop?

Below k = n^(1/3 + eps) the upper region edge is the plain block entropy (no
forced decrease); above it, crowding of the square-law bins forces a decrease
that grows like 1.5 k log2(k / n^(1/3)).  The sweep writes one CSV row per k
with the lower edge, the non-asymptotic upper edge, and the simplified
asymptotic forms, matching the `region` CLI subcommand.
"""

import math
import sys

import numpy as np

from pattern_entropy import range_decreases

n, eps = 10**6, 0.2
eps1 = math.log(20.0) / math.log(n)
threshold = n ** (1 / 3 + eps)

print(f"# n={n}, eps={eps}, n^eps1=20, threshold k = n^(1/3+eps) = {threshold:.0f}",
      file=sys.stderr)

ks = sorted({int(k) for k in np.geomspace(100, 10**7, 40)})
print("k,branch,lower_decrease_logkfact,upper_decrease_nonasym,upper_decrease_stirling,"
      "upper_decrease_asym,gamma")
for k in ks:
    row = range_decreases(k, n, eps, eps1)
    gamma = "" if row["gamma"] is None else f"{row['gamma']:.6f}"
    print(f"{k},{'above' if row['upper_valid'] else 'below'},"
          f"{row['lower_logkfact']:.6g},{row['upper_nonasym']:.6g},"
          f"{row['upper_stirling']:.6g},{row['upper_asym']:.6g},{gamma}")
