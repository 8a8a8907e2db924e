"""
Stabilizer profiles on the 3-regular tree
=========================================

Counts portraits of root stabilizers for a few universal groups and
compares them radius by radius.
"""
from chabtree import preset, stabilizer_profile, moving_profile
from chabtree.chabauty import agreement_radius

# four local-action choices on the same base edge
specs = {nm: preset(nm)[1] for nm in ("t3sym", "t3alt", "t3triv", "t3intrans")}

for nm, spec in specs.items():
    sizes = [len(stabilizer_profile(spec, "a", r)) for r in range(4)]
    print(f"{nm:10s} |profile(r)| for r=0..3: {sizes}")

# Sym keeps growing (non-discrete), Alt stops at 3 (discrete)

# moving profiles: the root can only land on same-type vertices,
# so D=1 adds nothing over D=0
sym = specs["t3sym"]
print("moving, r=1:", {D: len(moving_profile(sym, "a", 1, D)) for D in (0, 1, 2)})

rep = agreement_radius(sym, specs["t3alt"], "a", Rmax=3)
print("Sym vs Alt agree up to radius", rep.r_star, "-> pseudo-distance", rep.pseudo_distance)
