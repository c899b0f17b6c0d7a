"""Decomposition leaves no numerical fingerprint.

The same run on 1, 2, and 4 partitions writes byte-identical text output:
ghost exchange copies bits, reductions accumulate in ascending global index
order, and output gathers to global order before rendering.
"""

import pathlib
import tempfile

from thornsim.cli import run

par = pathlib.Path(__file__).parent / "params" / "wave_standing.par"
outputs = {}
for partitions in (1, 2, 4):
    out = pathlib.Path(tempfile.mkdtemp(prefix=f"p{partitions}_"))
    code = run([str(par), "--partitions", str(partitions), "--out-dir", str(out)])
    assert code == 0
    outputs[partitions] = {f.name: f.read_bytes() for f in sorted(out.glob("*.asc"))}
    print(f"partitions={partitions}: wrote {sorted(outputs[partitions])}")

reference = outputs[1]
for partitions in (2, 4):
    for name, blob in outputs[partitions].items():
        verdict = "byte-identical" if blob == reference[name] else "DIFFERS"
        print(f"  p={partitions} {name}: {verdict}")
