# Cayley balls, growth and ends.
#
# Every group here is given by concrete arithmetic on tuple keys.  A ball is
# a breadth-first search out to some radius, and everything downstream reads
# distances off it.

from qirigid import build_ball, count_ends, growth_report, make_model

# The integers with generators {+-2, +-3}: 1 needs two letters (3 - 2) while
# 3 needs one, so word length is not |n|.
z23 = make_model("int_gens:2,3")
ball = build_ball(z23, 6)
print("ball of radius 6 in Z{2,3}:", len(ball), "elements")
print("word lengths of 1..9:", [ball.dist[(n,)] for n in range(1, 10)])

# Sphere sizes separate the linear-growth groups from the rest.
for text, radius in [("int_gens:1", 10), ("dihedral_inf", 10), ("grid_2", 10), ("free:2", 7)]:
    report = growth_report(build_ball(make_model(text), radius))
    print(f"{text:>14}: spheres {list(report.sphere_sizes[:8])} -> {report.classification}")

# Ends: components outside B(2) that still reach the outer sphere of B(6).
for text in ["int_gens:1", "dihedral_inf", "grid_2", "free:2", "cyclic:5"]:
    print(f"{text:>14}: {count_ends(build_ball(make_model(text), 6), 2)} ends")

# Balls export as CSV for other tools
print(build_ball(make_model("dihedral_inf"), 1).edges_csv())
