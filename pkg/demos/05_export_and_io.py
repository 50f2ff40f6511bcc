"""Network serialization: canonical JSON and Wavefront OBJ lifts."""

import pathlib
import tempfile

from perinet import catalog, length, length_quotient, volume
from perinet.io import export_obj, network_from_json, network_to_json

net, entry = catalog("dia")
text = network_to_json(net)
print("canonical JSON for the diamond network:")
print(text)

back = network_from_json(text)
print(f"round-trip: L {length(back):.17g} (delta {abs(length(back) - length(net)):.1e}), "
      f"V {volume(back):.17g}, L^3/V {length_quotient(back):.12f}")

out = pathlib.Path(tempfile.mkdtemp())
for name in ("dia", "bnn", "pcu"):
    net, _ = catalog(name)
    path = out / f"{name}.obj"
    count = export_obj(net, str(path), cells=2)
    print(f"{name}: wrote {path} with {count} line records over 2^3 cells")
print("load the .obj files in any mesh viewer to inspect the lifts")
