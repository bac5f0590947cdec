"""Run the interpolation engine on an interpolable and a non-interpolable input.

On the dyadic rationals every planted dummy finds a real element to stand
for.  On the two-element chain 0 < 1 there is nothing strictly between, so
dummies stay put, yet the output relation is still interpolable.
"""
from idealspace.engine import audit, complete
from idealspace.ideals import interpolable_bounded
from idealspace.relations import catalog

for name, bound in (("dyadic", 20), ("two-chain", 3)):
    out = complete(catalog(name))
    rep = audit(out, 300)
    replaced = sum(d.replaced_at is not None for d in out.dummies)
    print(f"{name}: {len(out.dummies)} dummies, {replaced} replaced, audit clean={rep.clean}")
    print("  interpolable up to", bound, "->", interpolable_bounded(out.x_relation, bound, 300).status.value)
    for line in out.engine.log_lines(300)[:12]:
        if "activated" in line or "replaced" in line:
            print("   ", line)
