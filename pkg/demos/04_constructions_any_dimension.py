"""Balanced networks of any admissible degree over an arbitrary lattice.

The three constructors cover every case d >= n+1: a one-vertex bouquet
for even d >= 2n, a Fermat-point tripod with loops for odd d, and a
split edge with loops for the remaining even d.
"""

import numpy as np

from perinet import (
    Lattice,
    classify,
    construct_bouquet,
    construct_even_two_vertex,
    construct_odd,
    force_all,
    length_quotient,
    validate,
)

rng = np.random.default_rng(0)

for n in (2, 3, 4, 5):
    # a generic lattice: identity plus a mild random shear
    lat = Lattice(np.eye(n) + rng.uniform(-0.15, 0.15, (n, n)))
    print(f"dimension n = {n}")
    for d in range(n + 1, 2 * n + 3):
        builds = []
        if d % 2 == 1:
            builds.append(("tripod+loops", construct_odd(n, d, lat)))
        else:
            builds.append(("split edge", construct_even_two_vertex(n, d, lat, 0.4)))
            if d >= 2 * n:
                builds.append(("bouquet", construct_bouquet(n, d, lat)))
        for label, net in builds:
            rep = validate(net)
            tag = classify(net.graph).tag
            print(f"  d = {d:2d} {label:13s} -> {tag:7s} valid={rep.ok} "
                  f"max force {force_all(net).max_norm:.1e} "
                  f"L^n/V = {length_quotient(net):10.4f}")
    print()
