"""How close do bit stuffing, bit flipping and symbol sliding get to capacity?

For each reference constraint we solve the characteristic equation for its
largest root, then maximize the sliding rate over the bias p for every
sliding index j. Stuffing is j = 0, flipping j = 1.
"""

from dkcodes import Constraint, optimize_rate, reproduce_table4, solve_lambda

c = Constraint(1, 3)
res = solve_lambda(c)
print(f"{c}: lambda = {res.lam:.10f}, capacity = {res.capacity:.6f} bits/symbol")

# the index j that wins depends on the constraint
for j in range(c.span + 1):
    prof = optimize_rate(c, j)
    print(f"  SS({j}): best p = {prof.p_star:.6f}, rate = {prof.rate:.6f}, efficiency {100 * prof.efficiency:.4f}%")

print()
print(f"{'(d,k)':>7} {'C':>7} {'stuff':>8} {'flip':>8} {'slide':>8}  j*   (published in brackets)")
for r in reproduce_table4():
    cap, s0, s1, sj, jp = r.published
    print(
        f"{f'({r.d},{r.k})':>7} {r.capacity:7.4f} {r.stuffing_efficiency:8.2f} {r.flipping_efficiency:8.2f} "
        f"{r.sliding_efficiency:8.2f}  {r.j_star}    [{s0:.2f} {s1:.2f} {sj:.2f} {jp}]"
    )
