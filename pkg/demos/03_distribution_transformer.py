"""The distribution transformer turns fair coin flips into p-biased bits and back.

It is an arithmetic decoder run on the message; the inverse is the matching
encoder. Each biased bit costs about h(p) input bits.
"""

from dkcodes import binary_entropy, bias_inverse, bias_transform, random_bits

u = random_bits(200_000, 1)
for p in (0.5, 0.6823, 0.9):
    res = bias_transform(u, p)
    back = bias_inverse(res, p)
    assert back == u[: res.consumed]
    zeros = res.bits.count_zeros() / len(res)
    print(
        f"p={p:<7} produced {len(res):7d} symbols, zero fraction {zeros:.4f}, "
        f"{res.consumed / len(res):.4f} input bits/symbol (h(p) = {binary_entropy(p):.4f})"
    )

# the last register contents are not implied by the symbols; the container stores them
res = bias_transform(u, 0.8)
print(f"termination tail: {len(res.tail)} bits")
