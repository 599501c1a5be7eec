import csv
import json
import math

import pytest

from zkfl.metrics import CSV_COLUMNS, DURATION_FIELDS, RoundReport, Stopwatch, summarize, write_reports, write_summary


def report(i, **kw):
    base = dict(round=i, mode="direct", n=4, d=610, t_train=0.01 * i, t_enc=0.02, t_aggr=0.001,
                t_prove=0.1 + 0.01 * i, t_verify_client=0.05)
    base.update(kw)
    return RoundReport(**base)


def rows_by_term(rows):
    return {r["term"]: r for r in rows}


def test_single_report_means():
    r = report(1)
    rows = rows_by_term(summarize([r]))
    assert rows["E(train)"]["mean"] == r.t_train
    assert rows["E(ZKP.gen)"]["mean"] == r.t_prove
    assert rows["E(train)"]["std"] == 0.0
    assert rows["E_aggregator"]["mean"] == pytest.approx(r.t_aggr + r.t_prove)
    assert rows["E_client"]["mean"] == pytest.approx(r.t_train + r.t_enc + r.t_verify_client)


def test_blockchain_mode_terms():
    reps = [report(i, mode="blockchain", t_verify_client=None, t_verify_miner=0.03, t_chain_read=1e-4,
                   t_select=0.01) for i in range(1, 4)]
    rows = rows_by_term(summarize(reps))
    assert "E(ZKP.ver)" not in rows and "E_client" not in rows
    assert rows["E(chain.read)"]["mean"] == pytest.approx(1e-4)
    assert rows["E_client_block"]["count"] == 3


def test_thirty_round_stddevs():
    rows = summarize([report(i) for i in range(1, 31)])
    assert all(r["count"] == 30 for r in rows)
    assert all(r["std"] >= 0 and not math.isnan(r["std"]) for r in rows)
    train = rows_by_term(rows)["E(train)"]
    xs = [0.01 * i for i in range(1, 31)]
    m = sum(xs) / 30
    assert train["std"] == pytest.approx(math.sqrt(sum((x - m) ** 2 for x in xs) / 29))


def test_summarize_needs_reports():
    with pytest.raises(ValueError):
        summarize([])


def test_csv_columns_match_fields(tmp_path):
    reps = [report(1), report(2, outcome="halted", diagnostics="product")]
    csv_path, json_path = write_reports(reps, tmp_path)
    with open(csv_path) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = list(reader)
    assert tuple(header) == CSV_COLUMNS
    assert len(body) == 2
    data = json.loads(json_path.read_text())
    assert [list(d) for d in data] == [list(CSV_COLUMNS)] * 2
    assert data[1]["diagnostics"] == "product"
    write_summary(summarize(reps), tmp_path)
    assert (tmp_path / "summary.csv").exists() and (tmp_path / "summary.json").exists()


def test_deterministic_view_drops_durations():
    view = report(1).deterministic_view()
    assert not set(view) & set(DURATION_FIELDS)
    assert view["d"] == 610


def test_stopwatch_accumulates():
    sw = Stopwatch()
    with sw.time("a"):
        pass
    with sw.time("a"):
        pass
    assert sw.totals["a"] >= 0
