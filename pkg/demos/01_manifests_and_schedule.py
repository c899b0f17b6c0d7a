"""Tour: thorn manifests, activation, reflection, and the schedule tree.

Parses the built-in thorn declarations, activates a run, looks variables up
by name, and prints the deterministic schedule the flesh will execute.
"""

from thornsim import (
    activate,
    build_schedule,
    list_variables,
    lookup_variable,
    parse_run_config,
    print_manifest,
    render_schedule,
    validate_closure,
)
from thornsim.cli import discover_manifests

manifests = discover_manifests([])
print("== discovered thorns ==")
for name, m in sorted(manifests.items()):
    print(f"  {name:<12} implements {m.implementation:<12} "
          f"groups={len(m.groups)} params={len(m.params)} schedule={len(m.schedule_items)}")

print("\n== canonical form of the wavetoy declaration ==")
print(print_manifest(manifests["wavetoy"]))

config = parse_run_config("""
ActiveThorns = "driver mol wavetoy io_ascii"
driver::global_n = 32
driver::t_final = 0.5
mol::dt = 0.015625
""")

report = validate_closure(list(manifests.values()), config)
print("== closure validation ==")
print(report)

state = activate([manifests[n] for n in config.active_thorns], config)
tree = build_schedule(state)

print("\n== run-time reflection ==")
handle = lookup_variable(state, "wavetoy::phi")
print(f"  wavetoy::phi -> kind={handle.kind} timelevels={handle.timelevels} "
      f"group={handle.group.name} parity={handle.parity}")
print("  glob wavetoy::* ->", [h.full_name for h in list_variables(state, "wavetoy::*")])
print("  dormant thorn lookup: odetest::u ->", end=" ")
try:
    lookup_variable(state, "odetest::u")
except Exception as e:
    print(type(e).__name__, "(inactive thorns contribute nothing)")

print("\n== schedule tree ==")
print(render_schedule(tree))
