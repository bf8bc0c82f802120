# Checking a candidate map to the line.
#
# verify_qi tests both distortion inequalities on every pair of ball
# vertices.  It also measures the constants the later stages really need:
# how far the nearest-image snap is from its own inverse, and how dense the
# image is in R.

from qirigid import build_ball, builtin_qi, make_model, verify_qi
from qirigid.qi import QiMap

for text in ["int_gens:1", "int_gens:2,3", "dihedral_inf", "product_int_cyclic:2"]:
    model = make_model(text)
    qi = builtin_qi(model)
    r = verify_qi(build_ball(model, 12), qi)
    print(
        f"{text:>22} via {qi.name}: verified={r.verified}  lambda={r.tight_lambda:g}  "
        f"eps={r.tight_epsilon:g}  density={r.density_k:g}  effective eps={r.effective_epsilon:g}"
    )

# A straw man: project the plane onto its first coordinate.  The scan finds
# two points a full column apart with the same image.
grid = make_model("grid_2")
bad = verify_qi(build_ball(grid, 6), builtin_qi(grid))
a, b, which, slack = bad.violations[0]
print(f"\ngrid_2 first-coordinate map: {len(bad.violations)} violations, e.g. {a} vs {b} ({which}, slack {slack:g})")

# Custom maps are plain callables with claimed constants.
double = QiMap(lambda k: 2 * k[0], claimed_lambda=2, claimed_epsilon=0, name="double")
print("n -> 2n on Z:", verify_qi(build_ball(make_model("int_gens:1"), 10), double).verified)
