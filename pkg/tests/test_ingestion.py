"""CSV loaders: generic schema, portal schemas, rejection accounting, and
the export round-trip."""

import pytest

from csts.ingestion import (
    BOSTON_TYPES_FILE,
    ColumnSchema,
    EXAMPLE_EVENTS_FILE,
    export_generic,
    load_boston,
    load_generic,
    load_pittsburgh,
)
from csts.oracle import RandomSpec, example_dataset, generate_random


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _datasets_equal(a, b):
    return (a.types == b.types and a.instances == b.instances
            and a.epoch == b.epoch)


# -- generic schema ---------------------------------------------------------

def test_bundled_example_file_loads_to_the_example_dataset():
    ds, report = load_generic(EXAMPLE_EVENTS_FILE)
    assert _datasets_equal(ds, example_dataset())
    assert report.rows_read == 61
    assert report.instances_kept == 61
    assert report.rows_rejected == 0
    assert report.types_found == 5


def test_blank_coordinate_rejected(tmp_path):
    path = _write(tmp_path, "f.csv", "type,x,y,time_minutes\n"
                                     "A,1,2,0\n"
                                     "B,,2,5\n"
                                     "A,3,4,9\n")
    ds, report = load_generic(path)
    assert report.rows_read == 3
    assert report.instances_kept == 2
    assert report.missing_coordinates == 1
    assert report.rows_rejected == 1
    assert len(ds.instances) == 2


def test_header_only_file(tmp_path):
    path = _write(tmp_path, "f.csv", "type,x,y,time_minutes\n")
    ds, report = load_generic(path)
    assert report.rows_read == 0
    assert report.instances_kept == 0
    assert len(ds.types) == 0
    assert len(ds.instances) == 0


def test_rejection_reasons_are_disjoint(tmp_path):
    path = _write(tmp_path, "f.csv", "type,x,y,time_minutes\n"
                                     ",1,2,0\n"          # missing type
                                     "A,1,,0\n"          # missing coordinate
                                     "A,1,2,\n"          # missing time
                                     "A,x,2,0\n"         # unparseable float
                                     "A,1,2,later\n"     # unparseable time
                                     "A,1,2,-5\n"        # negative minutes
                                     "A,nan,2,0\n"       # non-finite coordinate
                                     "A,1,2,7\n")        # the one good row
    ds, report = load_generic(path)
    assert report.rows_read == 8
    assert report.instances_kept == 1
    assert report.missing_type == 1
    assert report.missing_coordinates == 1
    assert report.missing_time == 1
    assert report.unparseable == 4
    assert report.rows_rejected == 7
    assert report.rejection_breakdown()["unparseable"] == 4
    assert ds.instances[0].time == 7


def test_type_ids_assigned_label_sorted(tmp_path):
    path = _write(tmp_path, "f.csv", "type,x,y,time_minutes\n"
                                     "zebra,0,0,0\n"
                                     "ant,0,0,1\n"
                                     "moth,0,0,2\n")
    ds, _ = load_generic(path)
    assert [t.label for t in ds.types] == ["ant", "moth", "zebra"]
    assert ds.instances[0].event_type == ds.id_of("zebra")


def test_missing_column_is_a_hard_error(tmp_path):
    path = _write(tmp_path, "f.csv", "type,x,y\nA,1,2\n")
    with pytest.raises(ValueError, match="time_minutes"):
        load_generic(path)


def test_unreadable_file_is_a_hard_error(tmp_path):
    with pytest.raises(OSError):
        load_generic(tmp_path / "absent.csv")


def test_custom_column_mapping(tmp_path):
    path = _write(tmp_path, "f.csv", "kind,lon,lat,minute\nA,1,2,3\n")
    schema = ColumnSchema(type_label="kind", x="lon", y="lat", time="minute")
    ds, report = load_generic(path, schema=schema)
    assert report.instances_kept == 1
    assert ds.instances[0].x == 1 and ds.instances[0].time == 3


def test_export_round_trip(tmp_path):
    for ds in [example_dataset(),
               generate_random(RandomSpec(seed=5, n_types=4, n_instances=30))]:
        out = tmp_path / "out.csv"
        export_generic(ds, out)
        back, report = load_generic(out, epoch=ds.epoch)
        assert _datasets_equal(back, ds)
        assert report.rows_rejected == 0


def test_export_matches_committed_fixture_bytes(tmp_path):
    out = tmp_path / "fixture.csv"
    export_generic(example_dataset(), out)
    assert out.read_bytes() == EXAMPLE_EVENTS_FILE.read_bytes()


def test_loading_is_deterministic(tmp_path):
    a, ra = load_generic(EXAMPLE_EVENTS_FILE)
    b, rb = load_generic(EXAMPLE_EVENTS_FILE)
    assert _datasets_equal(a, b)
    assert ra == rb


# -- Pittsburgh schema ------------------------------------------------------

PGH_HEADER = "PK,INCIDENTTIME,INCIDENTHIERARCHYDESC,X,Y\n"


def test_pittsburgh_loader(tmp_path):
    path = _write(tmp_path, "p.csv", PGH_HEADER +
                  "1,2017-01-01T00:10:00,THEFT,-79.99,40.44\n"
                  "2,2017-03-07T15:28:00,ASSAULT,-80.01,40.46\n"
                  "3,2016-12-31T23:59:00,THEFT,-79.98,40.43\n"   # before range
                  "4,2020-01-01T00:00:00,THEFT,-79.98,40.43\n"   # after range
                  "5,2017-05-01T08:00:00,,-79.97,40.41\n"        # no type
                  "6,2017-06-01T09:00:00,THEFT,,40.41\n")        # no coord
    ds, report = load_pittsburgh(path)
    assert report.rows_read == 6
    assert report.instances_kept == 2
    assert report.filtered == 2
    assert report.missing_type == 1
    assert report.missing_coordinates == 1
    assert ds.epoch == "2017-01-01T00:00"
    # minutes from the 2017 epoch
    assert ds.instances[0].time == 10
    assert sorted(t.label for t in ds.types) == ["ASSAULT", "THEFT"]


def test_pittsburgh_range_is_inclusive_of_final_day(tmp_path):
    path = _write(tmp_path, "p.csv", PGH_HEADER +
                  "1,2019-12-31T23:59:00,THEFT,-79.99,40.44\n")
    _, report = load_pittsburgh(path)
    assert report.instances_kept == 1


# -- Boston schema ----------------------------------------------------------

BOS_HEADER = ("INCIDENT_NUMBER,OFFENSE_CODE_GROUP,OCCURRED_ON_DATE,"
              "Lat,Long\n")


def _boston_file(tmp_path):
    return _write(tmp_path, "b.csv", BOS_HEADER +
                  "I1,Arson,2014-06-15 13:00:00,42.35,-71.06\n"
                  "I2,HOMICIDE,2014-02-01 02:30:00,42.33,-71.08\n"
                  "I3,Aggravated Assault,2014-03-03 10:00:00,42.36,-71.05\n"
                  "I4,Arson,2013-12-31 23:00:00,42.35,-71.06\n"    # pre-2014
                  "I5,Arson,2015-01-01 00:00:00,42.35,-71.06\n")   # post-2014


def test_boston_reduced_mode(tmp_path):
    ds, report = load_boston(_boston_file(tmp_path), reduced=True)
    # aggravated assault is not in the ten-type reduced list; matching is
    # case-insensitive so HOMICIDE still lands
    assert report.instances_kept == 2
    assert report.filtered == 3
    assert sorted(t.label for t in ds.types) == ["Arson", "HOMICIDE"]
    assert ds.epoch == "2014-01-01T00:00"


def test_boston_complete_mode(tmp_path):
    ds, report = load_boston(_boston_file(tmp_path), reduced=False)
    assert report.instances_kept == 3
    assert report.filtered == 2
    assert "Aggravated Assault" in {t.label for t in ds.types}


def test_boston_custom_whitelist(tmp_path):
    custom = _write(tmp_path, "types.json",
                    '{"reduced": ["aggravated assault"], "complete": ["arson"]}')
    _, report = load_boston(_boston_file(tmp_path), reduced=True,
                            types_file=custom)
    assert report.instances_kept == 1


def test_boston_bad_whitelist_file(tmp_path):
    bad = _write(tmp_path, "types.json", '{"reduced": []}')
    with pytest.raises(ValueError):
        load_boston(_boston_file(tmp_path), reduced=True, types_file=bad)


def test_boston_default_lists_are_sane():
    import json

    lists = json.loads(BOSTON_TYPES_FILE.read_text(encoding="utf-8"))
    assert len(lists["reduced"]) == 10
    assert len(lists["complete"]) == 26
    assert set(lists["reduced"]) <= set(lists["complete"])
