"""Activation, reflection, parameter binding, bins, and the main loop."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thornsim import (
    activate,
    build_schedule,
    list_variables,
    lookup_variable,
    main_loop,
    parse_manifest,
    parse_run_config,
    run_bin,
    set_parameter,
)
from thornsim.errors import (
    BindError,
    NotSteerable,
    OutOfRange,
    RoutineFailure,
    UnknownParameter,
    UnknownVariable,
)
from thornsim.flesh import ParameterStore


def _activate(builtin_manifests, cfg_text, **kw):
    cfg = parse_run_config(cfg_text)
    active = [builtin_manifests[n] for n in cfg.active_thorns]
    return activate(active, cfg, **kw)


WAVE_CFG = """
ActiveThorns = "driver mol wavetoy"
driver::global_n = 8
"""


# ---------------------------------------------------------------------------
# activate


def test_defaults_when_no_assignments(builtin_manifests):
    state = _activate(builtin_manifests, WAVE_CFG.replace("driver::global_n = 8", ""))
    assert state.params.get("wavetoy::amplitude") == 1.0
    assert state.params.get("mol::method") == "rk4"
    assert state.params.get("driver::global_n") == "16"


def test_bind_error_names_parameter(builtin_manifests):
    with pytest.raises(BindError) as err:
        _activate(builtin_manifests, WAVE_CFG + "mol::dt = -1\n")
    assert "mol::dt" in str(err.value)


def test_activation_order_insensitive_registry(builtin_manifests):
    a = _activate(builtin_manifests, 'ActiveThorns = "driver mol wavetoy"\ndriver::global_n = 8')
    b = _activate(builtin_manifests, 'ActiveThorns = "wavetoy mol driver"\ndriver::global_n = 8')
    assert sorted(a.registry) == sorted(b.registry)
    assert a.params.snapshot() == b.params.snapshot()


def test_storage_allocated_with_ghosts_and_zeroed(builtin_manifests):
    state = _activate(builtin_manifests, WAVE_CFG, partition_count=2)
    for part in state.partitions:
        phi = part.data("wavetoy::phi")
        assert phi.shape == (4 + 2,)  # interior 4 plus ghost 1 each side
        assert not phi.any()
        assert len(part.variables["wavetoy::phi"]) == 2  # timelevels
        assert part.data("wavetoy::phi_rhs").shape == (4,)  # ghost 0


def test_dormant_thorns_contribute_nothing(builtin_manifests):
    state = _activate(builtin_manifests, 'ActiveThorns = "driver mol"')
    assert "wavetoy::phi" not in state.registry
    assert "wavetoy::amplitude" not in state.params
    tree = build_schedule(state)
    assert all("wavetoy" not in c.key for calls in tree.bins.values() for c in calls)


# ---------------------------------------------------------------------------
# reflection


def test_lookup_variable(builtin_manifests):
    state = _activate(builtin_manifests, WAVE_CFG)
    handle = lookup_variable(state, "wavetoy::phi")
    assert handle.kind == "GF"
    assert handle.timelevels == 2
    assert handle.group.name == "scalars"
    assert handle.parity == "even"
    assert lookup_variable(state, "wavetoy::pi").parity == "odd"


def test_lookup_case_sensitive_and_dormant(builtin_manifests):
    state = _activate(builtin_manifests, WAVE_CFG)
    with pytest.raises(UnknownVariable):
        lookup_variable(state, "wavetoy::PHI")
    with pytest.raises(UnknownVariable):
        lookup_variable(state, "odetest::u")  # thorn not active


def test_list_variables_glob(builtin_manifests):
    state = _activate(builtin_manifests, WAVE_CFG)
    names = [h.full_name for h in list_variables(state, "wavetoy::p*")]
    assert names == ["wavetoy::phi", "wavetoy::phi_rhs", "wavetoy::pi", "wavetoy::pi_rhs"]
    assert list_variables(state, "nomatch::*") == []


def test_list_variables_empty_simulation(builtin_manifests):
    state = _activate(builtin_manifests, 'ActiveThorns = "mol"')
    assert list_variables(state, "*") == []


def test_reflection_totality(builtin_manifests):
    state = _activate(builtin_manifests, WAVE_CFG)
    declared = set()
    for m in state.manifests.values():
        for g in m.groups:
            declared |= {f"{m.implementation}::{v}" for v in g.members}
    reachable = {h.full_name for h in list_variables(state, "*")}
    assert reachable == declared
    for name in declared:
        assert lookup_variable(state, name).full_name == name


# ---------------------------------------------------------------------------
# set_parameter


def test_steering_rules(builtin_manifests):
    cfg = 'ActiveThorns = "driver mol wavetoy io_ascii"\ndriver::global_n = 8'
    state = _activate(builtin_manifests, cfg)
    set_parameter(state, "io_ascii::out_every", 5, phase="steering")
    assert state.params.get("io_ascii::out_every") == 5
    with pytest.raises(NotSteerable):
        set_parameter(state, "wavetoy::amplitude", 2.0, phase="steering")
    with pytest.raises(OutOfRange):
        set_parameter(state, "mol::dt", -0.1, phase="initial")
    with pytest.raises(UnknownParameter):
        set_parameter(state, "nobody::nothing", 1, phase="initial")
    # initial phase may set non-steerable parameters
    set_parameter(state, "wavetoy::amplitude", 2.0, phase="initial")
    assert state.params.get("wavetoy::amplitude") == 2.0


@given(st.lists(st.tuples(st.sampled_from(["mol::dt", "mol::icn_iterations", "mol::method"]),
                          st.one_of(st.floats(allow_nan=False, allow_infinity=False),
                                    st.integers(-100, 100),
                                    st.sampled_from(["rk2", "rk4", "icn", "bogus"]))),
                max_size=12))
@settings(max_examples=60, deadline=None)
def test_parameter_safety_property(assignments):
    """After any set_parameter sequence, every stored value satisfies its range."""
    from thornsim.cli import discover_manifests

    manifests = discover_manifests([])
    cfg = parse_run_config('ActiveThorns = "mol"')
    state = activate([manifests["mol"]], cfg)
    for name, value in assignments:
        try:
            set_parameter(state, name, value, phase="initial")
        except (OutOfRange, UnknownParameter):
            pass
    for name in state.params.names():
        assert state.params.decl(name).accepts(state.params.get(name))


# ---------------------------------------------------------------------------
# run_bin / main_loop


def test_empty_bin_is_noop(builtin_manifests):
    state = _activate(builtin_manifests, WAVE_CFG)
    build_schedule(state)
    before = {n: [p.data(n).copy() for p in state.partitions] for n in ("wavetoy::phi",)}
    run_bin(state, "PRESTEP")
    for p, arr in zip(state.partitions, before["wavetoy::phi"]):
        assert np.array_equal(p.data("wavetoy::phi"), arr)


def test_run_bin_sync_contract(builtin_manifests, routine_registry):
    text = (
        'thorn syncer\nimplements syncer\ninherits driver\n'
        'group data kind=GF ghost=1 { f }\n'
        'schedule Fill at INITIAL\n{ writes: syncer::data sync: syncer::data } ""'
    )
    manifest = parse_manifest(text)

    def fill(ctx):
        ctx.interior("syncer::f")[...] = np.arange(ctx.partition.lo[0], ctx.partition.hi[0])

    routine_registry("syncer", "Fill", fill, mode="local")
    cfg = parse_run_config('ActiveThorns = "driver syncer"\ndriver::global_n = 8')
    state = activate([builtin_manifests["driver"], manifest], cfg, partition_count=2)
    build_schedule(state)
    run_bin(state, "INITIAL")
    assert state.partitions[0].data("syncer::f")[-1] == 4.0
    assert state.partitions[1].data("syncer::f")[0] == 3.0


def test_routine_failure_named_and_terminates(builtin_manifests, routine_registry):
    manifest = parse_manifest(
        'thorn bad\nimplements bad\nschedule Boom at EVOL\n{ } ""'
    )

    def boom(ctx):
        raise RuntimeError("kapow")

    routine_registry("bad", "Boom", boom, mode="global")
    cfg = parse_run_config('ActiveThorns = "driver mol bad"\ndriver::t_final = 1.0')
    state = activate([builtin_manifests["driver"], builtin_manifests["mol"], manifest], cfg)
    build_schedule(state)
    with pytest.raises(RoutineFailure) as err:
        main_loop(state)
    assert "bad::Boom" in str(err.value)
    assert "kapow" in str(err.value)
    assert state.control == "terminating"


def test_terminate_runs_even_after_failure(builtin_manifests, routine_registry):
    manifest = parse_manifest(
        'thorn bad\nimplements bad\n'
        'schedule Boom at EVOL\n{ } ""\n'
        'schedule Bye at TERMINATE\n{ } ""'
    )
    seen = []
    routine_registry("bad", "Boom", lambda ctx: 1 / 0, mode="global")
    routine_registry("bad", "Bye", lambda ctx: seen.append("bye"), mode="global")
    cfg = parse_run_config('ActiveThorns = "driver mol bad"\ndriver::t_final = 1.0')
    state = activate([builtin_manifests["driver"], builtin_manifests["mol"], manifest], cfg)
    build_schedule(state)
    with pytest.raises(RoutineFailure):
        main_loop(state)
    assert seen == ["bye"]


def test_zero_t_final_runs_initial_and_terminate_once(builtin_manifests, routine_registry):
    manifest = parse_manifest(
        'thorn probe\nimplements probe\n'
        'schedule Init at INITIAL\n{ } ""\n'
        'schedule Bye at TERMINATE\n{ } ""'
    )
    counts = {"init": 0, "bye": 0}
    routine_registry("probe", "Init", lambda ctx: counts.__setitem__("init", counts["init"] + 1),
                     mode="global")
    routine_registry("probe", "Bye", lambda ctx: counts.__setitem__("bye", counts["bye"] + 1),
                     mode="global")
    cfg = parse_run_config('ActiveThorns = "driver probe"\ndriver::t_final = 0.0')
    state = activate([builtin_manifests["driver"], manifest], cfg)
    build_schedule(state)
    report = main_loop(state)
    assert report.iterations == 0
    assert counts == {"init": 1, "bye": 1}


def test_iteration_count_and_final_time(builtin_manifests):
    cfg = (
        'ActiveThorns = "driver mol odetest"\n'
        'driver::t_final = 1.0\n'
        "mol::dt = 0.1\n"
    )
    state, report = _run_loop(builtin_manifests, cfg)
    assert report.iterations == 10
    assert state.time == pytest.approx(1.0, abs=1e-12)


def _run_loop(builtin_manifests, cfg_text):
    cfg = parse_run_config(cfg_text)
    active = [builtin_manifests[n] for n in cfg.active_thorns]
    state = activate(active, cfg)
    build_schedule(state)
    return state, main_loop(state)


def test_local_routines_run_once_per_partition(builtin_manifests, routine_registry):
    manifest = parse_manifest(
        'thorn probe\nimplements probe\ninherits driver\nschedule Tick at INITIAL\n{ } ""'
    )
    ranks = []
    routine_registry("probe", "Tick", lambda ctx: ranks.append(ctx.rank), mode="local")
    cfg = parse_run_config('ActiveThorns = "driver probe"\ndriver::global_n = 9')
    state = activate([builtin_manifests["driver"], manifest], cfg, partition_count=3)
    build_schedule(state)
    run_bin(state, "INITIAL")
    assert ranks == [0, 1, 2]


def test_parameter_store_never_steerable_after_bind():
    store = ParameterStore()
    decl = parse_manifest(
        'thorn t\nimplements t\nparam real x "d"\n{ 0.0:* } default 1.0'
    ).param("x")
    store.declare("t::x", decl)
    store.bind("t::x", "2.5")
    assert store.get("t::x") == 2.5
    with pytest.raises(NotSteerable):
        store.set("t::x", 3.0, phase="steering")
    assert store.get("t::x") == 2.5
