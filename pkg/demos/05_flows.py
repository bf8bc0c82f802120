# Certifying from linear growth alone, with no map to the line.
#
# Push a maximum {0,1}-flow from the identity to a far vertex.  When spheres
# stay small, two of them carry the same flow pattern; gluing the segment
# between them closes the flow into a cycle, and lifting the cycle back
# gives a group element that moves one sphere to the other.

from qirigid import build_ball, make_model
from qirigid.flow import (
    ball_network,
    detect_virtually_z_via_flow,
    find_flow_cycle,
    find_repeat,
    flow_magnitude,
    lift_cycle,
    max_flow,
    quotient_segment,
)

ball = build_ball(make_model("dihedral_inf"), 16)
net = ball_network(ball)
flow = max_flow(net)
print("max flow from e to", net.labels[net.sink], "=", flow_magnitude(flow, net))

rep = find_repeat(ball, net, flow)
print("first repeated cross-sections at radii", rep.k1, rep.k2)
q, qf = quotient_segment(ball, net, flow, rep.k1, rep.k2, rep.iso)
cycle = find_flow_cycle(q, qf)
x, y, g = lift_cycle(ball, q, cycle, rep.k1, rep.k2, rep.iso)
print(f"cycle of length {len(cycle)} lifts from {x} to {y}; g = {g}")

for text in ["int_gens:1", "int_gens:2,3", "dihedral_inf", "grid_2", "free:2", "cyclic:6"]:
    v = detect_virtually_z_via_flow(text)
    print(f"{text:>14}: {v.verdict:<16} {v.reason}")

# growth of the min cut between B(t) and the complement of B(2t)
print("grid_2 min-cut table:", detect_virtually_z_via_flow("grid_2").mincut_table)
