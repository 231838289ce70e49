"""Interleaving several small transformers to hit capacity on (0,11).

k - d + 1 = 12 = 2 * 2 * 3, so the characteristic polynomial factors into two
binary pieces and one ternary piece. Four transformers are needed instead of
eleven, and the code is maxentropic.
"""

import numpy as np

from dkcodes import Constraint, InterleavedCode, il_decode, il_encode, maxentropic_distribution, phrase_histogram, random_bits, solve_lambda

c = Constraint(0, 11)
code = InterleavedCode.for_constraint(c)
print(f"H(z) = {code.plan.describe()}")
print(f"transformers: {code.plan.n_transformers}")
for (p, eta), chain in zip(zip(code.plan.primes, code.plan.strides), code.chain.biases):
    print(f"  P={p} stride {eta}: " + ", ".join(f"{b:.6f}" for b in chain))

print("\ncodebook (largest stride first):")
for word, phrase in code.codebook.entries():
    print(f"  {word:>4} -> {phrase}")

u = random_bits(10**6, 42)
cont = il_encode(u, code)
assert il_decode(cont) == u
cap = solve_lambda(c).capacity
print(f"\nrate {len(u) / len(cont.payload):.5f}, capacity {cap:.5f}")
print("empirical :", np.round(phrase_histogram(cont.payload, c).probs, 4))
print("expected  :", np.round(maxentropic_distribution(c).probs, 4))
