"""Tour of the catalog: the minimizing networks with exact coordinates.

Each entry is built from closed-form data, measured, validated, and
checked against its expected length quotient.
"""

from perinet import catalog, force_all, length, length_quotient, validate, volume
from perinet.construct import CATALOG_NAMES

print(f"{'name':12s} {'dim':>3s} {'deg':>3s} {'topology':8s} "
      f"{'L':>10s} {'V':>10s} {'L^n/V':>12s} {'expected':>12s} {'max force':>9s}")
for name in CATALOG_NAMES:
    net, entry = catalog(name)
    rep = validate(net)
    assert rep.ok, (name, rep.violations)
    q = length_quotient(net)
    fmax = force_all(net).max_norm
    print(f"{name:12s} {entry.dim:3d} {entry.degree:3d} {entry.topology.tag:8s} "
          f"{length(net):10.6f} {volume(net):10.6f} {q:12.8f} "
          f"{entry.expected_quotient:12.8f} {fmax:9.1e}")

print()
print("the cds family: one parameter, constant quotient")
for t in (0.1, 0.25, 0.5, 0.75, 0.9):
    net, _ = catalog("cds", t=t)
    print(f"  t = {t:4.2f}  ->  L^3/V = {length_quotient(net):.12f}")

print()
print("simplex networks generalize the diamond to any dimension")
for n in range(2, 7):
    net, entry = catalog("simplex_net", n=n)
    print(f"  n = {n}: L^n/V = {length_quotient(net):16.6f}   ({entry.expected_expr})")
