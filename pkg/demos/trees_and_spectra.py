"""Tree-generated spaces and level orders.

Along the all-zeros path the plain and underlined prefixes close to
different ideals when the tree is full, and to the same one when the tree
is only the root.  The level order on 3 x 8 rationals has maximal
compatible antichains of size exactly 3.
"""
from fractions import Fraction

from idealspace import fixtures as fx

zeros = (0,) * 6
for tree in ("full", "root-only"):
    space = fx.tree_space_t1(tree)
    cmp = fx.t1_prefix_closures(space, zeros, 4)
    print(f"T1 space, {tree} tree: |J|={len(cmp.J)} |I|={len(cmp.I)}",
          "same limit:", fx.same_limit(space, zeros, 4))

tel = fx.tree_space_telophase("full")
ok, wit = fx.telophase_common_bound(tel, zeros, 3)
print("telophase common bound for ([e,oo], [000,oo*]):", wit[((), (0, 0, 0))])
print("double origin separated:", fx.double_origin_separation(fx.tree_space_double_origin("full"), zeros, 3)[0])

grid, _ = fx.level_grid(3, [Fraction(k, 8) for k in range(8)])
found = fx.antichain_census(grid)
print(f"level 3 grid: {len(found)} maximal compatible antichains, sizes {sorted({len(a) for a in found})}")

star = fx.approximation_copy(fx.SpectrumSpec(lambda c: fx.OMEGA, {0: [(0, 1), (5, 0)]}),
                             "star", coding="4a+2+b")
star.run_to(10)
for ev in star.role_log:
    print("role change:", ev)
