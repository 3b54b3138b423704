from datetime import datetime, timezone

import numpy as np
import pytest

from icedrift import (
    EmptyFile,
    Fix,
    LocationFormat,
    MalformedRecord,
    NoOverlap,
    TooShort,
    Track,
    align_tracks,
    parse_locations,
    regularize,
    round_to_grid,
)
from icedrift.ingest import normalize_lon, track_to_csv

H = 1800  # grid step, seconds


def utc(*args) -> int:
    return int(datetime(*args, tzinfo=timezone.utc).timestamp())


def make_track(start, n, id="t", lat=75.0, lon=10.0):
    return Track(
        id=id, start=start, fixes=tuple(Fix(t=start + i * H, lat=lat, lon=lon) for i in range(n))
    )


class TestParseLocations:
    def test_generic_csv_epoch(self):
        fixes = parse_locations(b"2019-10-01T00:30:00Z,85.0,120.0", LocationFormat.GENERIC_CSV)
        assert fixes == [Fix(t=1569889800, lat=85.0, lon=120.0)]
        # independent epoch oracle
        assert fixes[0].t == utc(2019, 10, 1, 0, 30)

    def test_rawlocs_day_one_origin(self):
        fixes = parse_locations(b"2020 1.0 -150.0 75.0", LocationFormat.RAW_LOCS)
        assert fixes == [Fix(t=1577836800, lat=75.0, lon=-150.0)]
        assert fixes[0].t == utc(2020, 1, 1)

    def test_rawlocs_day_zero_origin(self):
        fixes = parse_locations(
            b"2020 1.5 -150.0 75.0", LocationFormat.RAW_LOCS, day_origin="zero"
        )
        assert fixes[0].t == utc(2020, 1, 2, 12, 0)

    def test_rawlocs_fractional_half_hour(self):
        # day 1 plus exactly 30 minutes
        day = 1.0 + 1800.0 / 86400.0
        fixes = parse_locations(
            f"2020 {day!r} 10.0 70.0".encode(), LocationFormat.RAW_LOCS
        )
        assert fixes[0].t == utc(2020, 1, 1, 0, 30)

    @pytest.mark.parametrize("line", [b"% year day lon lat", b"# comment", b"   "])
    def test_comment_lines_skipped(self, line):
        content = line + b"\n2020 1.0 -150.0 75.0\n"
        assert len(parse_locations(content, LocationFormat.RAW_LOCS)) == 1

    def test_header_rows_skipped(self):
        csv = b"timestamp,lat,lon\n2019-10-01T00:00:00Z,70.0,10.0\n"
        assert len(parse_locations(csv, LocationFormat.GENERIC_CSV)) == 1
        raw = b"year day longitude latitude\n2020 1.0 -150.0 75.0\n"
        assert len(parse_locations(raw, LocationFormat.RAW_LOCS)) == 1

    def test_malformed_line_fails_whole_parse(self):
        content = b"2019-10-01T00:00:00Z,70.0,10.0\nbogus,99,xx\n"
        with pytest.raises(MalformedRecord) as exc:
            parse_locations(content, LocationFormat.GENERIC_CSV)
        assert exc.value.line_no == 2

    def test_out_of_range_latitude_is_malformed(self):
        with pytest.raises(MalformedRecord):
            parse_locations(b"2019-10-01T00:00:00Z,95.0,10.0", LocationFormat.GENERIC_CSV)

    def test_empty_inputs(self):
        with pytest.raises(EmptyFile):
            parse_locations(b"", LocationFormat.GENERIC_CSV)
        with pytest.raises(EmptyFile):
            parse_locations(b"% only comments\n", LocationFormat.RAW_LOCS)

    def test_not_utf8(self):
        with pytest.raises(MalformedRecord):
            parse_locations(b"\xff\xfe\x00bad", LocationFormat.GENERIC_CSV)

    def test_lon_normalized_into_half_open_range(self):
        fixes = parse_locations(b"2019-10-01T00:00:00Z,70.0,250.0", LocationFormat.GENERIC_CSV)
        assert fixes[0].lon == -110.0
        fixes = parse_locations(b"2019-10-01T00:00:00Z,70.0,-180.0", LocationFormat.GENERIC_CSV)
        assert fixes[0].lon == 180.0


class TestRoundToGrid:
    def test_nearest_mark(self):
        t = utc(2019, 10, 1, 12, 14)
        (out,) = round_to_grid([Fix(t=t, lat=70, lon=10)])
        assert out.t == utc(2019, 10, 1, 12, 0)

    def test_tie_rounds_up(self):
        t = utc(2019, 10, 1, 12, 15)
        (out,) = round_to_grid([Fix(t=t, lat=70, lon=10)])
        assert out.t == utc(2019, 10, 1, 12, 30)

    def test_no_collision_keeps_both(self):
        base = utc(2019, 10, 1, 12, 0)
        out = round_to_grid(
            [Fix(t=base + 600, lat=70, lon=10), Fix(t=base + 1200, lat=71, lon=10)]
        )
        assert [f.t for f in out] == [base, base + H]
        assert [f.lat for f in out] == [70, 71]

    def test_collision_keeps_closest(self):
        base = utc(2019, 10, 1, 12, 0)
        out = round_to_grid(
            [Fix(t=base + 60, lat=70, lon=10), Fix(t=base + 300, lat=71, lon=10)]
        )
        assert len(out) == 1
        assert (out[0].t, out[0].lat) == (base, 70)

    def test_collision_distance_tie_keeps_earlier(self):
        base = utc(2019, 10, 1, 12, 0)
        out = round_to_grid(
            [Fix(t=base - 300, lat=69, lon=10), Fix(t=base + 300, lat=71, lon=10)]
        )
        assert len(out) == 1
        assert out[0].lat == 69

    def test_empty_in_empty_out(self):
        assert round_to_grid([]) == []

    def test_idempotent_on_random_sets(self):
        rng = np.random.default_rng(1234)
        for _ in range(200):
            ts = np.unique(rng.integers(0, 10_000_000, size=rng.integers(1, 40)))
            fixes = [Fix(t=int(t), lat=60.0, lon=float(i % 300 - 150)) for i, t in enumerate(ts)]
            once = round_to_grid(fixes)
            twice = round_to_grid(once)
            assert twice == once
            assert all(b.t > a.t for a, b in zip(once, once[1:]))


class TestRegularize:
    def test_already_uniform_unchanged(self):
        fixes = [Fix(t=i * H, lat=70 + i * 0.01, lon=10.0) for i in range(3)]
        track = regularize(fixes, id="x")
        assert len(track) == 3
        assert tuple(fixes) == track.fixes

    def test_90min_gap_interpolated(self):
        fixes = [
            Fix(t=0, lat=80.0, lon=10.0),
            Fix(t=3 * H, lat=80.2, lon=10.2),
        ]
        track = regularize(fixes, id="x")
        assert len(track) == 4
        assert track.fixes[1].lat == pytest.approx(80.0 + 0.2 / 3, abs=1e-12)
        assert track.fixes[1].lon == pytest.approx(10.0 + 0.2 / 3, abs=1e-12)
        assert track.fixes[2].lat == pytest.approx(80.0 + 0.4 / 3, abs=1e-12)
        assert track.fixes[2].lon == pytest.approx(10.0 + 0.4 / 3, abs=1e-12)

    def test_exactly_24h_gap_still_filled(self):
        fixes = [Fix(t=0, lat=70.0, lon=0.0), Fix(t=86400, lat=71.0, lon=1.0)]
        track = regularize(fixes, id="x")
        assert len(track) == 49  # 47 interpolated instants

    def test_gap_over_24h_truncates_to_too_short(self):
        # day0 00:00 then day1 00:30 -> 88200 s gap leaves a single-fix prefix
        fixes = [Fix(t=0, lat=70.0, lon=0.0), Fix(t=88200, lat=71.0, lon=1.0)]
        with pytest.raises(TooShort):
            regularize(fixes, id="x")

    def test_truncates_at_fix_before_gap(self):
        fixes = [
            Fix(t=0, lat=70.0, lon=0.0),
            Fix(t=H, lat=70.1, lon=0.1),
            Fix(t=H + 90000, lat=72.0, lon=2.0),
            Fix(t=H + 90000 + H, lat=72.1, lon=2.1),
        ]
        track = regularize(fixes, id="x")
        assert len(track) == 2
        assert track.end == H

    def test_antimeridian_interpolation(self):
        fixes = [Fix(t=0, lat=80.0, lon=179.9), Fix(t=2 * H, lat=80.0, lon=-179.9)]
        track = regularize(fixes, id="x")
        mid = track.fixes[1]
        assert mid.lon == pytest.approx(180.0, abs=1e-9)
        assert abs(mid.lon) > 1.0  # never interpolates through zero

    def test_non_grid_input_rejected(self):
        with pytest.raises(ValueError):
            regularize([Fix(t=0, lat=70, lon=0), Fix(t=900, lat=70, lon=0)], id="x")

    def test_uniform_grid_invariant_over_random_gap_patterns(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            t = 0
            fixes = [Fix(t=0, lat=70.0, lon=0.0)]
            for _ in range(int(rng.integers(1, 30))):
                t += int(rng.integers(1, 60)) * H
                fixes.append(Fix(t=t, lat=70.0 + t * 1e-7, lon=t * 1e-7))
            try:
                track = regularize(fixes, id="r")
            except TooShort:
                continue
            # hole-free uniform grid, truncated no later than the first >24 h gap
            assert all(
                f.t == track.start + i * H for i, f in enumerate(track.fixes)
            )
            assert track.start == fixes[0].t
            first_big = next(
                (a.t for a, b in zip(fixes, fixes[1:]) if b.t - a.t > 86400), None
            )
            if first_big is not None:
                assert track.end <= first_big


class TestAlignTracks:
    def test_identical_tracks_full_window(self):
        a = make_track(0, 5, id="a")
        b = make_track(0, 5, id="b")
        win = align_tracks([a, b])
        assert win.start == 0 and win.end == 4 * H
        assert all(len(t) == 5 for t in win.tracks)

    def test_interval_intersection(self):
        a = make_track(0, 21, id="a")  # 00:00 .. 10:00
        b = make_track(10 * H, 21, id="b")  # 05:00 .. 15:00
        win = align_tracks([a, b])
        assert win.start == 10 * H and win.end == 20 * H
        assert all(len(t) == 11 for t in win.tracks)

    def test_disjoint_raises(self):
        a = make_track(0, 3, id="a")
        b = make_track(100 * H, 3, id="b")
        with pytest.raises(NoOverlap):
            align_tracks([a, b])

    def test_identical_time_vectors(self):
        a = make_track(0, 10, id="a")
        b = make_track(2 * H, 10, id="b")
        win = align_tracks([a, b])
        stamps = [tuple(f.t for f in t.fixes) for t in win.tracks]
        assert stamps[0] == stamps[1]


class TestTrackType:
    def test_rejects_hole(self):
        fixes = (Fix(t=0, lat=70, lon=0), Fix(t=2 * H, lat=70, lon=0))
        with pytest.raises(ValueError):
            Track(id="x", start=0, fixes=fixes)

    def test_rejects_off_grid_start(self):
        fixes = (Fix(t=900, lat=70, lon=0), Fix(t=900 + H, lat=70, lon=0))
        with pytest.raises(ValueError):
            Track(id="x", start=900, fixes=fixes)

    def test_rejects_single_fix(self):
        with pytest.raises(TooShort):
            Track(id="x", start=0, fixes=(Fix(t=0, lat=70, lon=0),))

    def test_csv_round_trip(self):
        track = regularize(
            [Fix(t=0, lat=75.123456789, lon=-150.987654321), Fix(t=H, lat=75.2, lon=-151.0)],
            id="rt",
        )
        text = track_to_csv(track)
        back = parse_locations(text.encode(), LocationFormat.GENERIC_CSV)
        assert tuple(back) == track.fixes


def test_normalize_lon_boundaries():
    assert normalize_lon(180.0) == 180.0
    assert normalize_lon(-180.0) == 180.0
    assert normalize_lon(540.0) == 180.0
    assert normalize_lon(0.0) == 0.0
    assert normalize_lon(-540.0) == 180.0
    assert normalize_lon(359.0) == -1.0
