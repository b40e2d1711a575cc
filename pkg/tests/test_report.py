import csv
import io
import json
import math

from pfreq.asymptotics import Record
from pfreq.report import CSV_COLUMNS, csv_text, failing_tags, fmt, summarize, write_all, write_plots


def _records():
    return [
        Record("sweep_p", "teo:limite", "interval", 1, 1 / 64, 8.0, 1.0, "lane_emden", value=2.0, gap=0.1,
               param=8.0, passed=None, seconds=0.5),
        Record("sweep_p", "teo:limite", "interval", 1, 1 / 64, 4.0, 1.0, "lane_emden", value=3.0, gap=0.2,
               param=4.0, passed=None, seconds=0.25),
        Record("sweep_p", "teo:limite", "interval", route="audit", passed=True, slack=0.1, note="gap"),
        Record("bounds", "A4", "interval", 1, None, 2.0, 1.0, "one_d", value=1.0, target=2.0, slack=-1.0,
               passed=False),
        Record("bounds", "eq:pqstima2", "box", passed=None, note="skipped: needs p > N"),
        Record("strip", "eq:claim", "strip", passed=True,
               detail={"profile": {"x1": [0.0, 1.0], "w": [0.2, 0.1], "barrier": [0.3, 0.2]}}),
    ]


def test_columns_and_status():
    rows = list(csv.reader(io.StringIO(csv_text(_records()))))
    assert tuple(rows[0]) == CSV_COLUMNS
    status = {r[1]: r[CSV_COLUMNS.index("pass")] for r in rows[1:]}
    assert status["A4"] == "fail" and status["eq:pqstima2"] == "skip" and status["eq:claim"] == "pass"
    assert all(r[CSV_COLUMNS.index("seconds")] == "" for r in rows[1:])


def test_timings_fill_seconds():
    rows = list(csv.reader(io.StringIO(csv_text(_records(), timings=True))))
    assert "0.5" in [r[CSV_COLUMNS.index("seconds")] for r in rows[1:]]


def test_csv_is_order_independent():
    recs = _records()
    assert csv_text(recs) == csv_text(list(reversed(recs)))
    ps = [r[CSV_COLUMNS.index("p")] for r in csv.reader(io.StringIO(csv_text(recs))) if r[1] == "teo:limite"]
    assert ps.index("4") < ps.index("8")


def test_fmt():
    assert fmt(None) == "" and fmt(math.inf) == "inf" and fmt(True) == "true"
    assert fmt(1 / 3) == "0.3333333333" and fmt(3) == "3"


def test_summary_and_failing_tags():
    recs = _records()
    assert failing_tags(recs) == ["A4"]
    by_tag = {r["tag"]: r for r in summarize(recs)}
    assert by_tag["A4"]["status"] == "fail" and by_tag["A4"]["min_slack"] == -1.0
    assert by_tag["eq:pqstima2"]["status"] == "info"


def test_write_all_is_deterministic(tmp_path):
    a = write_all(_records(), tmp_path / "a", plots=True)
    b = write_all(list(reversed(_records())), tmp_path / "b", plots=True)
    for key in ("csv", "json", "summary"):
        assert a[key].read_bytes() == b[key].read_bytes()
    assert [p.name for p in a["plots"]] == [p.name for p in b["plots"]]
    for pa, pb in zip(a["plots"], b["plots"]):
        assert pa.read_bytes() == pb.read_bytes()
    data = json.loads(a["json"].read_text())
    assert data[0].keys() >= set(CSV_COLUMNS) | {"note", "detail"}


def test_plot_kinds(tmp_path):
    names = sorted(p.name for p in write_plots(_records(), tmp_path))
    assert names == ["report_gap_00.svg", "report_profile_00.svg"]
