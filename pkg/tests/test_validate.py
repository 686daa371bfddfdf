import pytest

from flowlens import ValidationError, block_hierarchy, parse_spec, validate

from conftest import fixture_text


def chart_of(text: str):
    return validate(parse_spec(text))


def err_of(text: str) -> ValidationError:
    with pytest.raises(ValidationError) as err:
        chart_of(text)
    return err.value


def test_defaults_and_minimal_spec():
    chart = chart_of("{}")
    assert (chart.width, chart.height) == (400, 300)
    assert chart.datasets == () and chart.marks == ()


def test_full_fixture_validates():
    chart = chart_of(fixture_text("fig4"))
    assert [d.name for d in chart.datasets] == ["flights", "binned"]
    assert [t.kind for t in chart.datasets[1].transforms] == ["extent", "bin", "aggregate"]
    assert chart.signals[0].name == "binstep"
    assert [m.type for m in chart.marks] == ["symbol", "rect"]


def test_unknown_top_level_key():
    e = err_of('{"layout": {}}')
    assert e.path == ("layout",)
    assert e.span is not None


def test_dataset_needs_exactly_one_origin():
    e = err_of('{"data": [{"name": "d"}]}')
    assert "exactly one" in e.message
    e = err_of('{"data": [{"name": "d", "values": [], "url": "x.csv"}]}')
    assert e.path == ("data", 0)


def test_url_extension_checked():
    e = err_of('{"data": [{"name": "d", "url": "rows.parquet"}]}')
    assert e.path == ("data", 0, "url")


def test_duplicate_names_rejected():
    base = '{"data": [{"name": "d", "values": []}, {"name": "d", "values": []}]}'
    assert "duplicate" in err_of(base).message
    sig = '{"signals": [{"name": "s", "value": 1}, {"name": "s", "value": 2}]}'
    assert "duplicate" in err_of(sig).message


def test_unknown_source_and_cycles():
    e = err_of('{"data": [{"name": "d", "source": "ghost"}]}')
    assert e.path == ("data", 0, "source")
    cyc = ('{"data": [{"name": "a", "source": "b"},'
           ' {"name": "b", "source": "a"}]}')
    assert "cyclic" in err_of(cyc).message
    assert "cyclic" in err_of('{"data": [{"name": "a", "source": "a"}]}').message


def test_row_values_must_be_scalar_objects():
    e = err_of('{"data": [{"name": "d", "values": [{"a": [1]}]}]}')
    assert e.path == ("data", 0, "values", 0, "a")
    e = err_of('{"data": [{"name": "d", "values": [3]}]}')
    assert e.path == ("data", 0, "values", 0)


def test_unknown_transform_type():
    e = err_of('{"data": [{"name": "d", "values": [],'
               ' "transform": [{"type": "pivot"}]}]}')
    assert e.path == ("data", 0, "transform", 0, "type")


def test_bin_step_maxbins_exclusive():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "bin", "field": "m", "step": 1, "maxbins": 5}]}]}')
    assert "not both" in err_of(text).message


def test_bin_defaults_maxbins():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "bin", "field": "m"}]}]}')
    chart = chart_of(text)
    params = chart.datasets[0].transforms[0].params
    assert params["maxbins"] == 10 and params["step"] is None


def test_bin_unknown_signal_ref():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "bin", "field": "m", "step": {"signal": "nope"}}]}]}')
    e = err_of(text)
    assert e.path == ("data", 0, "transform", 0, "step")
    assert e.span is not None


def test_bin_extent_forms():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "bin", "field": "m", "extent": [0, "x"]}]}]}')
    assert "min, max" in err_of(text).message


def test_aggregate_defaults_to_count():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "aggregate", "groupby": ["g"]}]}]}')
    params = chart_of(text).datasets[0].transforms[0].params
    assert params == {"groupby": ["g"], "ops": ["count"], "fields": [None],
                      "as": ["count"]}


def test_aggregate_default_output_names():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "aggregate", "ops": ["mean", "count"],'
            '   "fields": ["v", null]}]}]}')
    params = chart_of(text).datasets[0].transforms[0].params
    assert params["as"] == ["mean_v", "count"]


def test_aggregate_op_needs_field():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "aggregate", "ops": ["sum"]}]}]}')
    assert "requires a field" in err_of(text).message


def test_aggregate_length_mismatch():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "aggregate", "ops": ["sum"], "fields": ["a", "b"]}]}]}')
    assert "match ops" in err_of(text).message


def test_collect_sort_normalization():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "collect", "sort": {"field": ["a", "b"],'
            '   "order": ["descending", "ascending"]}}]}]}')
    params = chart_of(text).datasets[0].transforms[0].params
    assert params == {"sort_fields": ["a", "b"],
                      "sort_orders": ["descending", "ascending"]}
    single = ('{"data": [{"name": "d", "values": [], "transform":'
              ' [{"type": "collect", "sort": {"field": "a"}}]}]}')
    assert chart_of(single).datasets[0].transforms[0].params["sort_orders"] == ["ascending"]


def test_collect_bad_order():
    text = ('{"data": [{"name": "d", "values": [], "transform":'
            ' [{"type": "collect", "sort": {"field": "a", "order": "up"}}]}]}')
    assert "ascending" in err_of(text).message


def test_signal_value_must_be_scalar():
    e = err_of('{"signals": [{"name": "s", "value": {"x": 1}}]}')
    assert e.path == ("signals", 0, "value")


def test_scale_enum_and_domain_shapes():
    e = err_of('{"scales": [{"name": "s", "type": "log", "domain": [0, 1],'
               ' "range": "width"}]}')
    assert e.path == ("scales", 0, "type")
    e = err_of('{"scales": [{"name": "s", "type": "linear", "domain": [1],'
               ' "range": "width"}]}')
    assert "min, max" in e.message
    e = err_of('{"scales": [{"name": "s", "type": "linear",'
               ' "domain": ["a", "b"], "range": "width"}]}')
    assert "min, max" in e.message


def test_scale_domain_dataset_must_exist():
    e = err_of('{"scales": [{"name": "s", "type": "linear",'
               ' "domain": {"data": "ghost", "field": "v"}, "range": "width"}]}')
    assert e.path == ("scales", 0, "domain", "data")


def test_scale_range_forms():
    e = err_of('{"scales": [{"name": "s", "type": "linear", "domain": [0, 1],'
               ' "range": "diagonal"}]}')
    assert "keyword" in e.message
    e = err_of('{"scales": [{"name": "s", "type": "ordinal", "domain": ["a"],'
               ' "range": []}]}')
    assert "empty" in e.message


def test_mark_references():
    e = err_of('{"marks": [{"type": "blob", "from": "d"}]}')
    assert e.path == ("marks", 0, "type")
    e = err_of('{"marks": [{"type": "rect", "from": "ghost"}]}')
    assert e.path == ("marks", 0, "from")


def test_channel_rules():
    base = ('{"data": [{"name": "d", "values": []}],'
            ' "scales": [{"name": "x", "type": "linear", "domain": [0, 1],'
            ' "range": "width"}],'
            ' "marks": [{"type": "symbol", "from": "d", "encode": %s}]}')
    e = err_of(base % '{"x": {"field": "a", "value": 2}}')
    assert "exactly one" in e.message
    e = err_of(base % '{"glow": {"value": 1}}')
    assert e.path == ("marks", 0, "encode", "glow")
    e = err_of(base % '{"x": {"scale": "x", "band": 1}}')
    assert "band-type" in e.message
    e = err_of(base % '{"x": {"signal": "nope"}}')
    assert e.path == ("marks", 0, "encode", "x", "signal")
    e = err_of(base % '{"x": {"scale": "ghost", "field": "a"}}')
    assert e.path == ("marks", 0, "encode", "x", "scale")


def test_axis_rules():
    e = err_of('{"axes": [{"scale": "ghost", "orient": "bottom"}]}')
    assert e.path == ("axes", 0, "scale")
    text = ('{"scales": [{"name": "c", "type": "ordinal", "domain": ["a"],'
            ' "range": ["#111"]}],'
            ' "axes": [{"scale": "c", "orient": "bottom"}]}')
    assert "positional" in err_of(text).message
    text = ('{"scales": [{"name": "x", "type": "linear", "domain": [0, 1],'
            ' "range": "width"}], "axes": [{"scale": "x", "orient": "up"}]}')
    assert err_of(text).path == ("axes", 0, "orient")


def test_block_hierarchy_shape():
    doc = parse_spec(fixture_text("fig4"))
    chart = validate(doc)
    root = block_hierarchy(doc, chart)
    assert root.label == "spec" and root.path == ()
    labels = [b.label for b in root.children]
    assert labels == ["data", "signals", "scales", "marks", "axes"]
    data = root.children[0]
    assert [b.label for b in data.children] == ["data:flights", "data:binned"]
    assert [b.label for b in data.children[1].children] == [
        "transform[0]:extent", "transform[1]:bin", "transform[2]:aggregate"]
    marks = root.children[3]
    assert [b.label for b in marks.children] == ["marks[0]:symbol", "marks[1]:rect"]
    assert [b.label for b in marks.children[0].children] == ["encode"]
    axes = root.children[4]
    assert [b.label for b in axes.children] == ["axes[0]:bottom", "axes[1]:left"]


def test_block_hierarchy_omits_missing_sections():
    doc = parse_spec(fixture_text("signals_axes"))
    root = block_hierarchy(doc, validate(doc))
    assert [b.label for b in root.children] == ["signals", "scales", "axes"]


def test_block_hierarchy_follows_document_key_order():
    text = ('{"marks": [{"type": "rect", "from": "d"}],'
            ' "data": [{"name": "d", "values": []}]}')
    doc = parse_spec(text)
    root = block_hierarchy(doc, validate(doc))
    assert [b.label for b in root.children] == ["marks", "data"]
