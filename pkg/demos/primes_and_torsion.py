"""
Layer primes, pro-pi transfer, torsion, and the valency-one example
===================================================================
"""
from chabtree import preset
from chabtree.chabauty import (
    layer_order, prime_content, render, torsion_claim_check,
    valency_one_report, verify_pro_pi_transfer,
)

_, sym = preset("t3sym")

# layer n = elements of profile(n+1) fixing B(n)
for n in range(4):
    print(n, layer_order(sym, "a", n), sorted(prime_content(sym, "a", n)))

print(verify_pro_pi_transfer(sym, {2}, r=1, k=2, depth=3, root_type="a").status)

# g^2 trivial on B(3) but g not trivial on B(2): the torsion claim fails for Sym
res = torsion_claim_check(sym, "a", p=2, n=1, M=3)
print("holds:", res.holds, "counterexample images:", res.counterexample.images)

rep = valency_one_report()
print(render(rep))
