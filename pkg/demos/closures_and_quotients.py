"""
k-closures, +_k groups and quotient graphs
==========================================
"""
from chabtree import KClosure, preset
from chabtree.chabauty import closure_descent_suite, quotient_graph, render, discreteness_check
from chabtree.profile import kclosure_profile, plus_k_profile

_, sym = preset("t3sym")
_, alt = preset("t3alt")

# universal groups are 1-closed: the closure changes nothing
for r in (1, 2, 3):
    print(r, len(kclosure_profile(sym, 1, "a", r)), len(kclosure_profile(alt, 1, "a", r)))

print(render(closure_descent_suite(sym, "a", r=2, kmax=3)))

# +_1 of Alt(3): edge fixators are trivial, so only the identity survives
print("|Alt+_1| at r=2:", len(plus_k_profile(alt, 1, "a", 2)))
print("|Sym+_1| at r=2:", len(plus_k_profile(sym, 1, "a", 2)))

print(render(discreteness_check(alt, "a", Rmax=3)))

# quotients: transitive local groups fold the tree back onto one edge,
# an intransitive one splits it
for nm in ("t3sym", "t3intrans", "t3triv"):
    print(f"--- {nm}")
    print(quotient_graph(preset(nm)[1], 4, "a").to_text())

print(quotient_graph(KClosure(sym, 2), 4, "a").to_text())
