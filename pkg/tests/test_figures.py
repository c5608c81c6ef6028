from affileval import aggregate, bias_record
from affileval.figures import render_report_figures


def _records():
    records = []
    for run, f1 in (("r1", 0.95), ("r2", 0.88), ("r3", 0.80)):
        records.append(bias_record("bipartite_density", 0.5, 0.4, f1, graph_id="g", run_id=run))
        records.append(bias_record("num_connected_components", 10.0, 12.0, f1, graph_id="g", run_id=run))
    return records


def test_renders_three_figures(tmp_path):
    records = _records()
    table = aggregate(records)
    paths = render_report_figures(table, records, tmp_path)
    assert [p.name for p in paths] == ["bias_heatmap.png", "mae_heatmap.png", "bias_vs_f1.png"]
    for p in paths:
        assert p.is_file()
        assert p.stat().st_size > 1000
        assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_empty_inputs_render_nothing(tmp_path):
    table = aggregate([])
    paths = render_report_figures(table, [], tmp_path)
    assert paths == []
    assert list(tmp_path.iterdir()) == []


def test_null_bias_records_skipped(tmp_path):
    # zero-truth records have no bias values to plot; must not crash
    records = [bias_record("avg_size_rest_components", 0.0, 2.0, 0.9, run_id="r1")]
    table = aggregate(records)
    paths = render_report_figures(table, records, tmp_path)
    assert paths == []
