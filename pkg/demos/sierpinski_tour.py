"""A walk around the two-point Sierpinski space.

The relation 0 < 0, 0 < 1, 1 < 1 has two ideals, {0} and {0, 1}.  We
rebuild it as a strict order, push the census through the rebuild and
back, and then make the closed point {I : 1 not in I} open.
"""
from idealspace.closures import strictify
from idealspace.constructions import ExtensionSpec, FiniteSet, extend_with_closed, extension_census
from idealspace.ideals import all_ideals, check_strict_image, strictify_back, strictify_forward
from idealspace.relations import catalog, freeze

sier = catalog("sierpinski")
census = all_ideals(freeze(sier, 0))
print("ideals:", [sorted(I) for I in census.ideals])
print("specialization:", sorted(census.specialization))

strict = strictify(sier)
for I in census.ideals:
    J = strictify_forward(sier, I)
    print(f"  {sorted(I)} -> codes {sorted(J.members_upto(3))[:6]}...",
          "back:", sorted(strictify_back(J)), check_strict_image(strict, J, 4).status.value)

ext = extend_with_closed(ExtensionSpec(sier, FiniteSet({1})))
cen = extension_census(ext, 8)
for fam, img in zip(cen.families, cen.images):
    shown = sorted(sorted(map(str, F)) for F in fam)
    print("extended ideal over", sorted(img), "first components", shown)
a, b = cen.families
print("comparable after extension:", a <= b or b <= a)
