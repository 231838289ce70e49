"""Symbol sliding on the (1,3) constraint reaches capacity.

With j = 2 and p = 1/lambda the phrase distribution produced by sliding is
exactly the maxentropic one. We check that analytically, then push a megabit of
random data through the distribution transformer and the sliding encoder.
"""

import numpy as np

from dkcodes import (
    Constraint,
    SlidingConfig,
    estimate_rate,
    full_decode,
    full_encode,
    maxentropic_distribution,
    phrase_histogram,
    random_bits,
    sliding_distribution,
    solve_lambda,
    ss_encode,
)

c = Constraint(1, 3)
lam = solve_lambda(c).lam
cfg = SlidingConfig(c, 2, 1 / lam)

print("maxentropic :", np.round(maxentropic_distribution(c).probs, 6))
print("SS(2) 1/lam :", np.round(sliding_distribution(cfg).probs, 6))
print("SS(0) p=1/2 :", sliding_distribution(SlidingConfig(c, 0, 0.5)).probs)

# hand-sized examples, no terminal phrase
for msg in ("00", "1", "01", "0100"):
    print(f"  {msg:>5} -> {ss_encode(msg, cfg, flush=False).bits.to_string()}")

u = random_bits(10**6, 42)
cont = full_encode(u, cfg)
assert full_decode(cont) == u
print(f"\n{len(u)} bits -> {len(cont.payload)} constrained bits, container {len(cont.to_bytes())} bytes")
print("empirical phrase histogram:", np.round(phrase_histogram(cont.payload, c).probs, 4))

rep = estimate_rate(cfg)
print(f"rate {rep.empirical_rate:.5f} vs analytic {rep.analytic_rate:.5f} (capacity {rep.capacity:.5f})")
