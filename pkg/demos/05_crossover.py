"""When does sliding one more position help?

SS(j) beats SS(j-1) exactly when p exceeds the root of p^j + p = 1, which is
1/lambda for the (j-1, infinity) constraint. Sweep p and watch the winner change.
"""

import numpy as np

from dkcodes import Constraint, SlidingConfig, rate_comparison_threshold, sliding_rate

c = Constraint(1, 7)
print("thresholds:", ", ".join(f"j={j}: {rate_comparison_threshold(j):.4f}" for j in range(1, c.span + 1)))
for p in np.arange(0.3, 0.96, 0.05):
    rates = [sliding_rate(SlidingConfig(c, j, p)) for j in range(c.span + 1)]
    best = int(np.argmax(rates))
    print(f"p={p:.2f}  best j={best}  rate={rates[best]:.5f}")
