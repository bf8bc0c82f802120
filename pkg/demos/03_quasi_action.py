# The induced action of G on R and its action on the two ends.
#
# g * x snaps x back into the group, multiplies by g, and maps forward
# again.  It is not an action, but it is one up to bounded error, and the
# error bounds are checkable.

from qirigid import build_ball, builtin_qi, make_model, verify_qi
from qirigid.ends import end_homomorphism_check
from qirigid.quasi_action import build_context, check_four_properties, derived_constants, point_grid, star

model = make_model("dihedral_inf")
qi = builtin_qi(model)
report = verify_qi(build_ball(model, 12), qi)
ctx = build_context(model, qi, report, x_max=400, w_max=12)
print("context ball radius", ctx.ball.radius, "constants", ctx.constants_dict())

r, s = (1, 0), (0, 1)
print("r * 2.0 =", star(ctx, r, 2.0), "  s * 5.0 =", star(ctx, s, 5.0))

props = check_four_properties(ctx, build_ball(model, 3).order, point_grid(20, 0.5))
print("four-property scan passed:", props.passed, "worst slack per property:", props.worst_slack)

# The reflection flips the ends, rotations preserve them; the kernel has index 2.
ends = end_homomorphism_check(ctx, 3)
print("sign map is a homomorphism on B(3):", ends.passed, " kernel index:", ends.index)
for g in [(0, 0), r, s, (2, 1), (-3, 0)]:
    print(f"   {g}: {ends.signs[g].value}")

# Thresholds used later, straight from the closed forms
print(derived_constants(2, 1, 5))
