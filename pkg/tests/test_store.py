"""Persistence: documents, CSV ingestion, and the directory store."""

import json

import numpy as np
import pytest

from allocwise.ahp import WeightVector
from allocwise.data import SYNTHETIC_DATASET_ID, bundled_matrix, bundled_tiers
from allocwise.errors import (
    IdConflictError,
    IntegrityError,
    NotFoundError,
    ParseError,
    SchemaValidationError,
)
from allocwise.forecasting import TimeSeries
from allocwise.store import (
    Dataset,
    FeatureTable,
    Scenario,
    bundled_examples,
    dataset_from_doc,
    dataset_to_doc,
    import_csv,
    scenario_from_doc,
    scenario_to_doc,
)
from conftest import monotone_series


def make_scenario(sid="demo", **kw):
    base = dict(
        id=sid,
        district="Demo District",
        tiers=bundled_tiers("gongshu"),
        matrix=bundled_matrix(),
    )
    base.update(kw)
    return Scenario(**base)


# --- object validation ---------------------------------------------------

def test_scenario_rejects_bad_id():
    for bad in ("", "Upper", "-lead", "has space"):
        with pytest.raises(SchemaValidationError):
            make_scenario(sid=bad).validate()


def test_scenario_rejects_matrix_and_weights_together():
    s = make_scenario(weights=WeightVector(np.array([0.4, 0.3, 0.2, 0.1])))
    with pytest.raises(SchemaValidationError):
        s.validate()


def test_scenario_rejects_neither_source():
    s = make_scenario(matrix=None)
    with pytest.raises(SchemaValidationError):
        s.validate()


def test_scenario_rejects_incomplete_tiers():
    tiers = bundled_tiers("gongshu")
    del tiers["HC"]
    with pytest.raises(SchemaValidationError):
        make_scenario(tiers=tiers).validate()


def test_scenario_rejects_negative_penalty():
    with pytest.raises(SchemaValidationError):
        make_scenario(penalty_rate=-0.1).validate()


def test_feature_table_shape_and_finiteness():
    with pytest.raises(SchemaValidationError):
        FeatureTable(columns=("a",), labels=("x", "y"), values=np.ones((1, 1)))
    with pytest.raises(SchemaValidationError):
        FeatureTable(columns=("a",), labels=("x",), values=np.array([[np.nan]]))


def test_feature_table_column_accessor():
    ft = FeatureTable(
        columns=("a", "b"), labels=("r1", "r2"),
        values=np.array([[1.0, 2.0], [3.0, 4.0]]),
    )
    col = ft.column("b")
    assert col.values.tolist() == [2.0, 4.0]


def test_dataset_kind_payload_agreement():
    with pytest.raises(SchemaValidationError):
        Dataset(id="x", kind="time_series", payload=FeatureTable(
            columns=("a",), labels=("r",), values=np.array([[1.0]])))
    with pytest.raises(SchemaValidationError):
        Dataset(id="x", kind="bogus", payload=None)


# --- documents --------------------------------------------------------------

def test_scenario_doc_round_trip_matrix_form():
    s = make_scenario()
    for numbers_as in (float, str):
        doc = scenario_to_doc(s, numbers_as=numbers_as)
        assert scenario_from_doc(doc) == s


def test_scenario_doc_round_trip_weights_form():
    s = make_scenario(matrix=None,
                      weights=WeightVector(np.array([0.4, 0.3, 0.2, 0.1])))
    doc = scenario_to_doc(s, numbers_as=str)
    assert isinstance(doc["weights"][0], str)
    assert scenario_from_doc(doc) == s


def test_scenario_doc_rejects_unknown_schema_version():
    doc = scenario_to_doc(make_scenario())
    doc["schema_version"] = 99
    with pytest.raises(SchemaValidationError):
        scenario_from_doc(doc)


def test_scenario_doc_rejects_bad_weights_field():
    doc = scenario_to_doc(make_scenario())
    doc["weights"] = {"not_matrix": 1}
    with pytest.raises(SchemaValidationError):
        scenario_from_doc(doc)


def test_dataset_doc_round_trip_is_bit_exact():
    from datetime import date, timedelta

    # awkward doubles: none of these have short decimal forms
    vals = np.array([0.1, 1 / 3, np.pi, 12345.6789, 123456789.123456789])
    dates = tuple(date(2021, 3, 23) + timedelta(days=k) for k in range(5))
    ds = Dataset(
        id="ts", kind="time_series",
        payload=TimeSeries(dates=dates, values=vals),
    )
    back = dataset_from_doc(dataset_to_doc(ds))
    assert np.array_equal(back.payload.values, vals)
    assert back.payload.dates == ds.payload.dates


def test_feature_table_doc_round_trip():
    ft = FeatureTable(
        columns=("NoR", "TC"), labels=("CenH", "ComH"),
        values=np.array([[2.041, 0.3], [2.014, 0.5]]),
    )
    ds = Dataset(id="ft", kind="feature_table", payload=ft)
    back = dataset_from_doc(dataset_to_doc(ds))
    assert back.payload.columns == ft.columns
    assert back.payload.labels == ft.labels
    assert np.array_equal(back.payload.values, ft.values)


# --- CSV ingestion -------------------------------------------------------------

def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_import_time_series_csv(tmp_path):
    p = write(tmp_path / "My Series.csv",
              "date,cumulative\n2021-03-23,100\n2021-03-24,103\n2021-03-25,110\n")
    ds = import_csv(p, "time_series")
    assert ds.id == "my-series"
    assert ds.payload.values.tolist() == [100.0, 103.0, 110.0]


def test_import_rejects_bad_header(tmp_path):
    p = write(tmp_path / "a.csv", "day,total\n2021-03-23,1\n2021-03-24,2\n")
    with pytest.raises(ParseError) as exc:
        import_csv(p, "time_series")
    assert exc.value.line == 1


def test_import_reports_bad_number_line(tmp_path):
    p = write(tmp_path / "a.csv",
              "date,cumulative\n2021-03-23,1\n2021-03-24,oops\n")
    with pytest.raises(ParseError) as exc:
        import_csv(p, "time_series")
    assert exc.value.line == 3


def test_import_rejects_date_gap(tmp_path):
    p = write(tmp_path / "a.csv",
              "date,cumulative\n2021-03-23,1\n2021-03-25,2\n")
    with pytest.raises(SchemaValidationError, match="daily"):
        import_csv(p, "time_series")


def test_import_rejects_non_monotone_dates(tmp_path):
    p = write(tmp_path / "a.csv",
              "date,cumulative\n2021-03-24,1\n2021-03-23,2\n")
    with pytest.raises(SchemaValidationError, match="line 3"):
        import_csv(p, "time_series")


def test_import_requires_two_rows(tmp_path):
    p = write(tmp_path / "a.csv", "date,cumulative\n2021-03-23,1\n")
    with pytest.raises(SchemaValidationError):
        import_csv(p, "time_series")


def test_import_skips_blank_lines(tmp_path):
    p = write(tmp_path / "a.csv",
              "date,cumulative\n2021-03-23,1\n\n2021-03-24,2\n\n")
    assert len(import_csv(p, "time_series").payload) == 2


def test_import_feature_table_csv(tmp_path):
    p = write(tmp_path / "tiers.csv",
              "tier,NoR,TC,NoS,Cost\n"
              "CenH,2.041,0.3,2.049,0.3\n"
              "ComH,2.014,0.5,1.729,0.2\n"
              "HC,1.513,0.6,0.853,0.1\n")
    ds = import_csv(p, "feature_table")
    ft = ds.payload
    assert ft.columns == ("NoR", "TC", "NoS", "Cost")
    assert ft.labels == ("CenH", "ComH", "HC")
    assert ft.column("NoS").values.tolist() == [2.049, 1.729, 0.853]


def test_import_feature_table_ragged_row(tmp_path):
    p = write(tmp_path / "t.csv", "tier,a,b\nr1,1,2\nr2,3\n")
    with pytest.raises(ParseError) as exc:
        import_csv(p, "feature_table")
    assert exc.value.line == 3


# --- store -----------------------------------------------------------------

def test_store_scenario_round_trip(store):
    stored = store.save_scenario(make_scenario())
    assert stored.created and stored.modified == stored.created
    assert store.load_scenario("demo") == stored


def test_store_preserves_created_across_overwrite(store, monkeypatch):
    stamps = iter(["2023-01-01T00:00:00Z", "2023-01-02T00:00:00Z"])
    monkeypatch.setattr("allocwise.store._now", lambda: next(stamps))
    first = store.save_scenario(make_scenario())
    second = store.save_scenario(first)
    assert second.created == "2023-01-01T00:00:00Z"
    assert second.modified == "2023-01-02T00:00:00Z"


def test_store_id_conflict_without_overwrite(store):
    store.save_scenario(make_scenario())
    with pytest.raises(IdConflictError):
        store.save_scenario(make_scenario(), overwrite=False)


def test_store_unknown_ids(store):
    with pytest.raises(NotFoundError):
        store.load_scenario("missing")
    with pytest.raises(NotFoundError):
        store.load_dataset("missing")


def test_store_rejects_dangling_dataset_reference(store):
    with pytest.raises(IntegrityError):
        store.save_scenario(make_scenario(dataset_id="nowhere"))


def test_store_load_detects_broken_reference(store):
    ds = Dataset(id="ts", kind="time_series",
                 payload=monotone_series(np.random.default_rng(1), 5))
    store.save_dataset(ds)
    store.save_scenario(make_scenario(dataset_id="ts"))
    index = json.loads(store.index_path.read_text())
    del index["datasets"]["ts"]
    store.index_path.write_text(json.dumps(index))
    with pytest.raises(IntegrityError):
        store.load_scenario("demo")


def test_store_layout_and_no_temp_litter(store):
    store.save_scenario(make_scenario())
    assert (store.scenario_dir / "demo.json").exists()
    index = json.loads(store.index_path.read_text())
    assert index["scenarios"]["demo"] == "scenarios/demo.json"
    assert index["schema_version"] == 1
    assert not list(store.root.rglob("*.tmp"))


def test_store_persists_numbers_as_strings(store):
    store.save_scenario(make_scenario())
    doc = json.loads((store.scenario_dir / "demo.json").read_text())
    assert isinstance(doc["penalty_rate"], str)
    assert isinstance(doc["weights"]["matrix"]["entries"][0][1], str)
    assert isinstance(doc["tiers"]["CenH"]["NoR"], str)


def test_store_dataset_round_trip_bit_exact(store):
    rng = np.random.default_rng(2)
    s = monotone_series(rng, 40)
    noisy = TimeSeries(
        dates=s.dates, values=s.values * (1 / 3) + np.pi * 1e-9
    )
    store.save_dataset(Dataset(id="ts", kind="time_series", payload=noisy))
    back = store.load_dataset("ts")
    assert np.array_equal(back.payload.values, noisy.values)


def test_store_list_datasets_reports_kind(store):
    store.save_dataset(Dataset(
        id="ts", kind="time_series",
        payload=monotone_series(np.random.default_rng(3), 5)))
    assert store.list_datasets() == {"ts": "time_series"}


def test_store_import_csv_conflicts_on_second_import(store, tmp_path):
    p = write(tmp_path / "s.csv",
              "date,cumulative\n2021-03-23,1\n2021-03-24,2\n")
    store.import_csv(p, "time_series")
    with pytest.raises(IdConflictError):
        store.import_csv(p, "time_series")


# --- bundled content ---------------------------------------------------------

def test_bundled_examples_values():
    gongshu, daoli = bundled_examples()
    assert gongshu.district == "Gongshu District, Hangzhou"
    assert daoli.district == "Daoli District, Harbin"
    assert gongshu.tiers["CenH"].features["NoR"] == 2.041
    assert daoli.tiers["CenH"].features["NoS"] == 2.545
    assert np.array_equal(gongshu.matrix.entries, daoli.matrix.entries)
    assert gongshu.created == "2022-12-18T00:00:00Z"


def test_ensure_bundled_seeds_and_is_idempotent(store):
    store.ensure_bundled()
    assert store.list_scenarios() == ["daoli", "gongshu"]
    assert SYNTHETIC_DATASET_ID in store.list_datasets()
    first = store.load_scenario("gongshu")
    store.ensure_bundled()
    assert store.load_scenario("gongshu") == first
    series = store.load_dataset(SYNTHETIC_DATASET_ID).payload
    assert len(series) == 501
