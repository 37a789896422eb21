import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fearover.route import (
    DuplicateLabel,
    EmptyDatabase,
    GeoPoint,
    IndexOutOfRange,
    MalformedRow,
    RouteDb,
    UnknownProvider,
    haversine_m,
)

from oracles import reference_great_circle_m

MINI_CSV = """\
label,lat,lon,SP1,SP2
A,33.1445,73.7457,-100,-90
B,33.1444,73.7456,-60,-70
C,33.1443,73.7455,-85,-50
"""


class TestLoadCsv:
    def test_survey_first_row(self, survey_db):
        first = survey_db.points[0]
        assert first.label == "A"
        assert first.point == GeoPoint(33.144552, 73.745719)
        assert first.signal("SP1") == -100
        assert first.signal("SP2") == -90
        assert first.signal("SP3") == -80

    def test_survey_providers_and_size(self, survey_db):
        assert survey_db.providers == ["SP1", "SP2", "SP3"]
        assert len(survey_db.points) == 14
        assert [p.label for p in survey_db.points] == list("ABCDEFGHIJKLMN")

    def test_cumulative_strictly_increasing(self, survey_db):
        pairs = zip(survey_db.cumulative_m, survey_db.cumulative_m[1:])
        assert survey_db.cumulative_m[0] == 0.0
        assert all(b > a for a, b in pairs)

    def test_total_length_matches_the_surveyed_road(self, survey_db):
        assert 8000 <= survey_db.route_length_m <= 9000

    def test_header_only_is_empty(self):
        with pytest.raises(EmptyDatabase):
            RouteDb.from_csv("label,lat,lon,SP1\n")

    def test_single_row_is_empty(self):
        with pytest.raises(EmptyDatabase):
            RouteDb.from_csv("label,lat,lon,SP1\nA,33.0,73.0,-50\n")

    def test_non_numeric_signal(self):
        text = MINI_CSV.replace("-100", "bad")
        with pytest.raises(MalformedRow):
            RouteDb.from_csv(text)

    def test_duplicate_label(self):
        text = MINI_CSV.replace("B,", "A,", 1)
        with pytest.raises(DuplicateLabel):
            RouteDb.from_csv(text)

    def test_signal_out_of_range(self):
        text = MINI_CSV.replace("-100", "-130")
        with pytest.raises(MalformedRow):
            RouteDb.from_csv(text)

    def test_missing_field(self):
        with pytest.raises(MalformedRow):
            RouteDb.from_csv("label,lat,lon,SP1,SP2\nA,33.0,73.0,-50\nB,33.1,73.1,-50,-60\n")

    def test_bad_header(self):
        with pytest.raises(MalformedRow):
            RouteDb.from_csv("name,lat,lon,SP1\n")

    def test_duplicate_provider_column(self):
        with pytest.raises(MalformedRow):
            RouteDb.from_csv("label,lat,lon,SP1,SP1\nA,33,73,-50,-60\nB,34,73,-50,-60\n")

    def test_out_of_range_coordinates(self):
        with pytest.raises(MalformedRow):
            RouteDb.from_csv("label,lat,lon,SP1\nA,95.0,73.0,-50\nB,33.1,73.1,-50\n")

    def test_comments_and_blank_lines_skipped(self):
        text = "# survey\n\n" + MINI_CSV
        assert len(RouteDb.from_csv(text).points) == 3

    def test_round_trip(self, survey_db):
        again = RouteDb.from_csv(survey_db.to_csv(), survey_db.bad_threshold_dbm)
        assert again == survey_db

    def test_fractional_dbm_round_trip(self):
        text = MINI_CSV.replace("-100", "-99.5")
        db = RouteDb.from_csv(text)
        assert db.points[0].signal("SP1") == -99.5
        assert RouteDb.from_csv(db.to_csv()) == db


class TestHaversine:
    def test_identity(self):
        p = GeoPoint(33.144552, 73.745719)
        assert haversine_m(p, p) == 0.0

    def test_symmetry_exact(self, survey_db):
        for a, b in itertools.combinations(survey_db.points, 2):
            assert haversine_m(a.point, b.point) == haversine_m(b.point, a.point)

    def test_matches_independent_formulation(self, survey_db):
        for a, b in itertools.combinations(survey_db.points, 2):
            ours = haversine_m(a.point, b.point)
            ref = reference_great_circle_m(
                a.point.latitude, a.point.longitude, b.point.latitude, b.point.longitude)
            assert ours == pytest.approx(ref, abs=1e-3)

    def test_triangle_inequality(self, survey_db):
        for a, b, c in itertools.combinations(survey_db.points, 3):
            ab = haversine_m(a.point, b.point)
            bc = haversine_m(b.point, c.point)
            ac = haversine_m(a.point, c.point)
            assert ac <= ab + bc + 1e-9

    @given(st.floats(-89, 89), st.floats(-179, 179),
           st.floats(-0.01, 0.01), st.floats(-0.01, 0.01))
    def test_small_offsets_agree_with_reference(self, lat, lon, dlat, dlon):
        p1 = GeoPoint(lat, lon)
        p2 = GeoPoint(lat + dlat, lon + dlon)
        assert haversine_m(p1, p2) == pytest.approx(
            reference_great_circle_m(lat, lon, lat + dlat, lon + dlon), abs=1e-3)

    def test_geopoint_validation(self):
        with pytest.raises(ValueError):
            GeoPoint(91.0, 0.0)
        with pytest.raises(ValueError):
            GeoPoint(0.0, 181.0)


class TestNextBssp:
    def test_sp3_from_start(self, survey_db):
        # A itself reads -80 for SP3 but is not ahead; the first bad point
        # ahead in the SP3 column is G at -85.
        point, distance = survey_db.next_bssp(0.0, "SP3")
        assert point.label == "G"
        assert distance == pytest.approx(survey_db.cumulative_m[6])

    def test_sp2_from_start(self, survey_db):
        point, _ = survey_db.next_bssp(0.0, "SP2")
        assert point.label == "G"

    def test_sp1_from_start(self, survey_db):
        point, distance = survey_db.next_bssp(0.0, "SP1")
        assert point.label == "E"
        assert 0 < distance <= survey_db.route_length_m

    def test_past_last_point(self, survey_db):
        assert survey_db.next_bssp(survey_db.route_length_m, "SP1") is None

    def test_unknown_provider(self, survey_db):
        with pytest.raises(UnknownProvider):
            survey_db.next_bssp(0.0, "SP9")

    def test_distance_positive_and_within_route(self, survey_db):
        for provider in survey_db.providers:
            position = 0.0
            while True:
                hit = survey_db.next_bssp(position, provider)
                if hit is None:
                    break
                _, distance = hit
                assert 0.0 < distance <= survey_db.route_length_m - position
                position += distance


class TestSignalQueries:
    def test_signal_at_start(self, survey_db):
        assert survey_db.signal_at(0, "SP1") == -100

    def test_signal_at_index_error(self, survey_db):
        with pytest.raises(IndexOutOfRange):
            survey_db.signal_at(99, "SP1")

    def test_future_signal_at_first_point(self, survey_db):
        # next point ahead of A is B
        assert survey_db.future_signal(0.0, "SP1") == -60

    def test_future_signal_between_points(self, survey_db):
        midpoint = (survey_db.cumulative_m[1] + survey_db.cumulative_m[2]) / 2
        assert survey_db.future_signal(midpoint, "SP1") == -50  # C

    def test_future_signal_clamps_at_end(self, survey_db):
        assert survey_db.future_signal(survey_db.route_length_m, "SP1") == -81  # N

    def test_current_signal_between_points(self, survey_db):
        midpoint = (survey_db.cumulative_m[1] + survey_db.cumulative_m[2]) / 2
        assert survey_db.current_signal(midpoint, "SP1") == -60  # B

    def test_unknown_provider(self, survey_db):
        with pytest.raises(UnknownProvider):
            survey_db.future_signal(0.0, "nope")


class TestBadThreshold:
    def test_threshold_is_inclusive(self):
        db = RouteDb.from_csv(MINI_CSV, bad_threshold_dbm=-85)
        # C reads exactly -85 for SP1: at the threshold counts as bad
        point, _ = db.next_bssp(0.0, "SP1")
        assert point.label == "C"

    def test_custom_threshold_changes_the_set(self):
        db = RouteDb.from_csv(MINI_CSV, bad_threshold_dbm=-95)
        assert db.next_bssp(0.0, "SP1") is None
