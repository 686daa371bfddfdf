import json

import pytest

from flowlens import (
    DataLoadError,
    EvalError,
    Session,
    SignalUpdate,
    UnknownSignal,
    instantiate,
    lower,
    parse_spec,
    validate,
)
from flowlens.runtime import DataDelta, _aggregate, _collect, _extent
from flowlens.scales import ScaleValue

from conftest import FIXTURE_EVENTS


def session_for(text: str, data_dir=".") -> Session:
    return Session.from_text(text, data_dir)


def rows_spec(rows, transform=None) -> str:
    dataset = {"name": "d", "values": rows}
    if transform:
        dataset["transform"] = transform
    return json.dumps({"data": [dataset]})


# -- data loading ---------------------------------------------------------

def test_csv_loading_coerces_cell_types(spec_dir):
    text = '{"data": [{"name": "d", "url": "cities.csv"}]}'
    s = session_for(text, spec_dir)
    s.run_initial()
    assert s.runtime.cache[0] == [
        {"name": "springfield", "pop": 30720, "area": 95.6, "capital": True},
        {"name": "shelbyville", "pop": None, "area": 81.2, "capital": False},
        {"name": "ogdenville", "pop": 12554, "area": None, "capital": True},
    ]
    assert isinstance(s.runtime.cache[0][0]["pop"], int)
    assert isinstance(s.runtime.cache[0][0]["area"], float)


def test_json_loading(spec_dir):
    text = '{"data": [{"name": "d", "url": "points.json"}]}'
    s = session_for(text, spec_dir)
    s.run_initial()
    assert s.runtime.cache[0] == [
        {"x": 1, "y": 2.5, "label": "a"},
        {"x": 2, "y": 4.0, "label": "b"},
        {"x": 3, "y": 1.25, "label": "c"},
    ]


def test_missing_data_file(tmp_path):
    text = '{"data": [{"name": "d", "url": "nope.csv"}]}'
    with pytest.raises(DataLoadError) as err:
        session_for(text, tmp_path)
    assert err.value.path == ("data", 0, "url")
    assert "not found" in err.value.message


def test_malformed_json_data(tmp_path):
    (tmp_path / "bad.json").write_text("{not json", encoding="utf-8")
    (tmp_path / "scalar.json").write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(DataLoadError):
        session_for('{"data": [{"name": "d", "url": "bad.json"}]}', tmp_path)
    with pytest.raises(DataLoadError, match="array of objects"):
        session_for('{"data": [{"name": "d", "url": "scalar.json"}]}', tmp_path)


# -- operator semantics ---------------------------------------------------

def test_copy_isolates_source_rows():
    text = ('{"data": [{"name": "base", "values": [{"v": 1}]},'
            ' {"name": "derived", "source": "base", "transform":'
            ' [{"type": "formula", "expr": "datum.v + 1", "as": "w"}]}]}')
    s = session_for(text)
    s.run_initial()
    source_rows = s.runtime.cache[0]
    derived_rows = s.runtime.cache[2]
    assert source_rows == [{"v": 1}]
    assert derived_rows == [{"v": 1, "w": 2}]
    # the source's own rows gained no field and share no dict objects
    assert all("w" not in r for r in source_rows)
    assert not any(a is b for a in source_rows for b in derived_rows)


def test_filter_keeps_truthy_rows():
    text = rows_spec([{"v": 1}, {"v": 0}, {"v": None}, {"v": 5}],
                     [{"type": "filter", "expr": "datum.v"}])
    s = session_for(text)
    s.run_initial()
    assert s.runtime.cache[1] == [{"v": 1}, {"v": 5}]


def test_formula_adds_field():
    text = rows_spec([{"v": 2}, {"v": 3}],
                     [{"type": "formula", "expr": "datum.v * datum.v", "as": "sq"}])
    s = session_for(text)
    s.run_initial()
    assert s.runtime.cache[1] == [{"v": 2, "sq": 4}, {"v": 3, "sq": 9}]


def test_extent_basic_and_nulls():
    assert _extent([{"v": 3}, {"v": 1}, {"v": 4}], "v") == (1, 4)
    assert _extent([{"v": None}, {"v": 2}, {}], "v") == (2, 2)
    assert _extent([], "v") == (None, None)
    with pytest.raises(EvalError, match="non-numeric"):
        _extent([{"v": "x"}], "v")


def test_bin_spec_example():
    text = rows_spec([{"v": 5}],
                     [{"type": "bin", "field": "v", "step": 2, "extent": [0, 10]}])
    s = session_for(text)
    s.run_initial()
    assert s.runtime.cache[1] == [{"v": 5, "bin_start": 4, "bin_end": 6}]


def test_bin_handles_nulls_and_strings():
    text = rows_spec([{"v": 5}, {"v": None}, {"v": "x"}],
                     [{"type": "bin", "field": "v", "step": 2, "extent": [0, 10]}])
    s = session_for(text)
    s.run_initial()
    assert s.runtime.cache[1][1] == {"v": None, "bin_start": None, "bin_end": None}
    assert s.runtime.cache[1][2] == {"v": "x", "bin_start": None, "bin_end": None}


def test_bin_maxbins_picks_nice_step():
    text = rows_spec([{"v": v} for v in (0, 3, 7, 42)],
                     [{"type": "bin", "field": "v", "maxbins": 10}])
    s = session_for(text)
    s.run_initial()
    # span 42 over <= 10 bins lands on the ladder step 5, anchored at 0
    assert s.runtime.cache[1][-1] == {"v": 42, "bin_start": 40, "bin_end": 45}
    assert s.runtime.cache[1][1] == {"v": 3, "bin_start": 0, "bin_end": 5}


def test_bin_signal_refs_resolve_from_env():
    text = ('{"data": [{"name": "d", "values": [{"v": 5}], "transform":'
            ' [{"type": "bin", "field": "v", "step": {"signal": "w"},'
            '   "extent": [0, 10]}]}],'
            ' "signals": [{"name": "w", "value": 3}]}')
    s = session_for(text)
    s.run_initial()
    assert s.runtime.cache[1] == [{"v": 5, "bin_start": 3, "bin_end": 6}]
    s.apply_event("w", 5)
    assert s.runtime.cache[1] == [{"v": 5, "bin_start": 5, "bin_end": 10}]


def test_bin_rejects_bad_step():
    text = ('{"data": [{"name": "d", "values": [{"v": 5}], "transform":'
            ' [{"type": "bin", "field": "v", "step": {"signal": "w"},'
            '   "extent": [0, 10]}]}],'
            ' "signals": [{"name": "w", "value": 0}]}')
    with pytest.raises(EvalError, match="positive number") as err:
        session_for(text).run_initial()
    assert err.value.node_id == 1


def test_aggregate_count_includes_nulls():
    rows = [{"g": "a", "v": 1}, {"g": "a", "v": None}, {"g": "b", "v": 2}]
    out = _aggregate(rows, {"groupby": ["g"], "ops": ["count", "sum", "mean"],
                            "fields": [None, "v", "v"],
                            "as": ["count", "sum_v", "mean_v"]})
    assert out == [
        {"g": "a", "count": 2, "sum_v": 1, "mean_v": 1.0},
        {"g": "b", "count": 1, "sum_v": 2, "mean_v": 2.0},
    ]


def test_aggregate_empty_groups():
    out = _aggregate([{"g": "a", "v": None}],
                     {"groupby": ["g"], "ops": ["sum", "mean", "min", "max"],
                      "fields": ["v"] * 4,
                      "as": ["s", "m", "lo", "hi"]})
    assert out == [{"g": "a", "s": 0, "m": None, "lo": None, "hi": None}]
    assert _aggregate([], {"groupby": ["g"], "ops": ["count"], "fields": [None],
                           "as": ["count"]}) == []


def test_aggregate_group_order_is_first_appearance():
    rows = [{"g": 2}, {"g": 1}, {"g": 2}, {"g": 3}]
    out = _aggregate(rows, {"groupby": ["g"], "ops": ["count"], "fields": [None],
                            "as": ["count"]})
    assert [r["g"] for r in out] == [2, 1, 3]


def test_aggregate_no_groupby_makes_one_row():
    out = _aggregate([{"v": 1}, {"v": 3}],
                     {"groupby": [], "ops": ["min", "max"], "fields": ["v", "v"],
                      "as": ["lo", "hi"]})
    assert out == [{"lo": 1, "hi": 3}]


def test_aggregate_rejects_non_numeric():
    with pytest.raises(EvalError, match="non-numeric"):
        _aggregate([{"v": "x"}], {"groupby": [], "ops": ["sum"], "fields": ["v"],
                                  "as": ["s"]})


def test_collect_multi_key_stable():
    rows = [{"a": 2, "b": 1, "i": 0}, {"a": 1, "b": 2, "i": 1},
            {"a": 2, "b": 1, "i": 2}, {"a": 1, "b": 1, "i": 3}]
    out = _collect(rows, {"sort_fields": ["a", "b"],
                          "sort_orders": ["ascending", "descending"]})
    assert [(r["a"], r["b"], r["i"]) for r in out] == [
        (1, 2, 1), (1, 1, 3), (2, 1, 0), (2, 1, 2)]


def test_collect_nulls_act_as_largest():
    rows = [{"v": None}, {"v": 2}, {"v": 1}]
    asc = _collect(rows, {"sort_fields": ["v"], "sort_orders": ["ascending"]})
    assert [r["v"] for r in asc] == [1, 2, None]
    desc = _collect(rows, {"sort_fields": ["v"], "sort_orders": ["descending"]})
    assert [r["v"] for r in desc] == [None, 2, 1]


def test_collect_mixed_types_fail():
    with pytest.raises(EvalError, match="cannot sort"):
        _collect([{"v": 1}, {"v": "x"}],
                 {"sort_fields": ["v"], "sort_orders": ["ascending"]})


def test_scaledomain_linear_and_band():
    text = ('{"data": [{"name": "d", "values":'
            ' [{"v": 3, "c": "b"}, {"v": 1, "c": "a"}, {"v": 4, "c": "b"}]}],'
            ' "scales": ['
            ' {"name": "x", "type": "linear", "domain": {"data": "d", "field": "v"},'
            '  "range": "width"},'
            ' {"name": "k", "type": "band", "domain": {"data": "d", "field": "c"},'
            '  "range": "width"}]}')
    s = session_for(text)
    s.run_initial()
    domains = {n.params["scale"]: s.runtime.cache[n.id]
               for n in s.desc.nodes if n.kind == "ScaleDomain"}
    assert domains["x"] == (1, 4)
    assert domains["k"] == ("b", "a")  # first-appearance order


def test_scale_value_construction():
    text = ('{"width": 500, "scales": [{"name": "x", "type": "linear",'
            ' "domain": [0, 50], "range": "width"}]}')
    s = session_for(text)
    s.run_initial()
    scale = s.runtime.cache[0]
    assert scale == ScaleValue("linear", (0, 50), (0, 500))
    assert scale.apply(25) == 250


def test_encode_channel_resolvers():
    text = ('{"width": 100, "height": 100,'
            ' "data": [{"name": "d", "values": [{"v": 5, "c": "a"}, {"v": 10, "c": "b"}]}],'
            ' "signals": [{"name": "s", "value": 10}],'
            ' "scales": ['
            '  {"name": "x", "type": "linear", "domain": [0, 10], "range": "width"},'
            '  {"name": "b", "type": "band", "domain": {"data": "d", "field": "c"},'
            '   "range": [0, 100]}],'
            ' "marks": [{"type": "symbol", "from": "d", "encode": {'
            '  "x": {"scale": "x", "field": "v"},'
            '  "y": {"field": "v"},'
            '  "size": {"signal": "s"},'
            '  "opacity": {"scale": "x", "signal": "s"},'
            '  "width": {"scale": "b", "band": 0.5},'
            '  "fill": {"value": "#123456"},'
            '  "x2": {"scale": "x", "value": 2}}}]}')
    s = session_for(text)
    s.run_initial()
    encode = next(n for n in s.desc.nodes if n.kind == "Encode")
    items = s.runtime.cache[encode.id]
    band = ScaleValue("band", ("a", "b"), (0, 100))
    assert items[0] == {"row": 0, "x": 50.0, "y": 5, "size": 10,
                        "opacity": 100.0, "width": band.bandwidth() * 0.5,
                        "fill": "#123456", "x2": 20.0}
    assert items[1]["row"] == 1 and items[1]["x"] == 100.0


def test_axisticks_output_shape(make_session):
    s = make_session("signals_axes", run=True)
    ticks_nodes = [n for n in s.desc.nodes if n.kind == "AxisTicks"]
    linear = s.runtime.cache[ticks_nodes[0].id]
    assert linear["range"] == [0, 200]
    assert [t["value"] for t in linear["ticks"]][:3] == [0.0, 0.1, 0.2]
    band = s.runtime.cache[ticks_nodes[1].id]
    assert [t["label"] for t in band["ticks"]] == ["p", "q"]


# -- pulses ----------------------------------------------------------------

def test_initial_pulse_covers_all_nodes(make_session):
    s = make_session("fig4")
    pulse = s.run_initial()
    assert pulse.pulse_id == 0
    assert pulse.trigger == "init"
    assert pulse.evaluated == frozenset(n.id for n in s.desc.nodes)
    assert len(pulse.timings) == len(s.desc.nodes)
    assert [t.seq for t in pulse.timings] == list(range(len(s.desc.nodes)))
    assert all(t.duration_ns >= 0 for t in pulse.timings)
    assert pulse.wall_total >= sum(t.duration_ns for t in pulse.timings)


def test_run_initial_only_once(make_session):
    s = make_session("minimal_bar", run=True)
    with pytest.raises(RuntimeError, match="already ran"):
        s.run_initial()


def test_signal_update_requires_initial_pulse(make_session):
    s = make_session("filter_signal")
    with pytest.raises(RuntimeError, match="run_initial"):
        s.apply_event("cutoff", 1)


def test_unknown_signal_rejected(make_session):
    s = make_session("filter_signal", run=True)
    with pytest.raises(UnknownSignal, match="'ghost'"):
        s.apply_event("ghost", 1)


def test_signal_pulse_hits_exactly_the_reachable_set(make_session):
    s = make_session("filter_signal")
    s.run_initial()
    pulse = s.apply_event("cutoff", 30)
    sig = next(n.id for n in s.desc.nodes if n.kind == "Signal")
    # independent reachability check over the edge list
    reach = {sig}
    frontier = [sig]
    while frontier:
        cur = frontier.pop()
        for src, dst in s.desc.edges:
            if src == cur and dst not in reach:
                reach.add(dst)
                frontier.append(dst)
    assert pulse.evaluated == frozenset(reach)
    # the untouched base dataset is not in the pulse
    assert 0 not in pulse.evaluated
    assert pulse.pulse_id == 1 and pulse.trigger == SignalUpdate("cutoff", 30)


def test_signal_update_changes_rows(make_session):
    s = make_session("filter_signal")
    s.run_initial()
    flt = next(n.id for n in s.desc.nodes if n.kind == "Filter")
    assert len(s.runtime.cache[flt]) == 8
    pulse = s.apply_event("cutoff", 30)
    assert len(s.runtime.cache[flt]) == 5
    assert pulse.data_deltas[flt] == DataDelta(rows_in=10, rows_out=5, changed=True)


def test_same_value_update_reports_unchanged(make_session):
    s = make_session("filter_signal")
    s.run_initial()
    pulse = s.apply_event("cutoff", 10)  # the initial value again
    assert all(not d.changed for d in pulse.data_deltas.values())
    assert pulse.evaluated  # still a full reachability pulse


def test_extent_publishes_into_env(make_session):
    s = make_session("extent_bin", run=True)
    assert s.runtime.env["m_extent"] == (12, 36)
    assert s.runtime.env["binstep"] == 3


def test_eval_error_carries_node_and_path():
    text = rows_spec([{"v": "oops"}],
                     [{"type": "filter", "expr": "datum.v > 3"}])
    s = session_for(text)
    with pytest.raises(EvalError) as err:
        s.run_initial()
    assert err.value.node_id == 1
    assert err.value.path == ("data", 0, "transform", 0)
    assert str(err.value).startswith("node 1: cannot compare")


def test_data_deltas_rows_in_counts_list_inputs(make_session):
    s = make_session("fig4")
    pulse = s.run_initial()
    deltas = pulse.data_deltas
    copy = next(n.id for n in s.desc.nodes if n.kind == "Copy")
    agg = next(n.id for n in s.desc.nodes if n.kind == "Aggregate")
    ext = next(n.id for n in s.desc.nodes if n.kind == "Extent")
    assert deltas[copy].rows_in == 2000 and deltas[copy].rows_out == 2000
    assert deltas[agg].rows_in == 2000
    # extent emits a scalar pair, not rows
    assert deltas[ext].rows_out == 0


def test_seq_follows_topological_order(make_session):
    s = make_session("fig4")
    pulse = s.run_initial()
    order = [t.node_id for t in sorted(pulse.timings, key=lambda t: t.seq)]
    pos = {nid: i for i, nid in enumerate(order)}
    for src, dst in s.desc.edges:
        assert pos[src] < pos[dst]


def test_reachable_from_mid_chain(make_session):
    s = make_session("fig4")
    copy = next(n.id for n in s.desc.nodes if n.kind == "Copy")
    reach = s.runtime.reachable_from(copy)
    assert copy in reach
    assert 0 not in reach  # upstream source is untouched
    # everything fed only by the raw source (its scale domains) is untouched
    sig = next(n.id for n in s.desc.nodes if n.kind == "Signal")
    assert sig not in reach


def test_fixture_events_replay(make_session):
    for name, events in FIXTURE_EVENTS.items():
        s = make_session(name)
        s.run_initial()
        for i, (signal, value) in enumerate(events, start=1):
            pulse = s.apply_event(signal, value)
            assert pulse.pulse_id == i
            assert pulse.wall_total >= sum(t.duration_ns for t in pulse.timings)
