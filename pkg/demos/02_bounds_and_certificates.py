"""Lower bounds, slack reports, and the equality-case certificates."""

import math

import numpy as np

from perinet import (
    PyramidInstance,
    bound_dipole,
    catalog,
    check_pyramid,
    check_simplex,
    dipole5_coefficients,
    monotonicity_table,
    verify,
    with_positions,
)
from perinet.construct import regular_simplex_vertices

print("dipole bounds sqrt((n+1)^(n-1) n^n) and even-degree bounds (d/2-n+1) n^n")
for n in range(2, 7):
    print(f"  n = {n}: dipole {bound_dipole(n):12.4f}   "
          f"even d=2n..2n+6: {[b for _, b in monotonicity_table(n, 2 * n + 6)]}")

print()
print("every catalog network sits exactly on its bound, certificate attached")
for name in ("dia", "cds", "bnn", "sqp", "pcu", "hcb"):
    rep = verify(catalog(name)[0])
    cert = rep.equality_certificate
    print(f"  {name:4s} [{rep.theorem}] slack = {rep.slack:+.2e}  "
          f"certificate {cert.name}: {'passed' if cert.passed else 'FAILED'}")

print()
print("perturbing a vertex opens positive slack and voids the certificate")
net, _ = catalog("sqp")
pos = np.array(net.positions)
pos[1] += [0.03, -0.01, 0.02]
rep = verify(with_positions(net, pos))
print(f"  perturbed sqp: slack = {rep.slack:+.5f}, certificate = {rep.equality_certificate}")

print()
print("integer coefficients of the fifth dipole edge: p4 = l1 p1 + l2 p2 + l3 p3")
lam, vol = dipole5_coefficients(catalog("sqp")[0])
print(f"  sqp: lambda = {lam}, signed volume = {vol:.6f} (= -225/64)")

print()
print("the simplex estimate: equality exactly for the centred regular simplex")
for n in (2, 3, 4):
    chk = check_simplex(regular_simplex_vertices(n))
    off = check_simplex(regular_simplex_vertices(n) + np.eye(n)[0])
    print(f"  n = {n}: centred lhs/rhs = {chk.lhs / chk.rhs:.12f} "
          f"(equality {chk.equality}); translated ratio {off.lhs / off.rhs:.3f}")

print()
print("the pyramid estimate at the square-pyramid equality configuration")
rho = math.sqrt(15) / 4
base = np.array([[rho, 0, -0.25], [0, rho, -0.25], [-rho, 0, -0.25], [0, -rho, -0.25]])
inst = PyramidInstance(apex=np.array([0.0, 0.0, 13 / 8]), base=base, probe=np.zeros(3))
chk = check_pyramid(inst)
print(f"  lhs = {chk.lhs:.6f}, rhs = {chk.rhs:.6f}, equality = {chk.equality}")
