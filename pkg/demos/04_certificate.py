# End-to-end certificate: a translation element, its orbit, the density of
# that orbit and the number of cosets it leaves.
from pathlib import Path

from qirigid import certify_virtually_z, recheck_certificate
from qirigid.rigidity import orbit_svg

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)

for text in ["int_gens:1", "dihedral_inf", "int_gens:2,3"]:
    cert = certify_virtually_z(text)
    print(f"{text}: {cert.verdict}  g={cert.g} (|g|={cert.g_word_length})  k={cert.quasi_density_k:g}  index={cert.index}")
    for check in cert.checks:
        print(f"    {'ok ' if check['passed'] else 'BAD'} {check['name']}: {check['detail']}")
    # anyone holding the JSON can redo the group-theoretic part
    print("    recheck:", recheck_certificate(cert.to_dict()) or "clean")

cert = certify_virtually_z("dihedral_inf")
(out / "dihedral_orbit.svg").write_text(orbit_svg(cert.orbit, cert.z_max))
print("orbit plot written to", out / "dihedral_orbit.svg")

# Straw men stop at the first failing check and say which one.
cert = certify_virtually_z("grid_2")
print("grid_2:", cert.verdict, "at", cert.failed_check)
