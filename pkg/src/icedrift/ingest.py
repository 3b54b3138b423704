"""Parsing and grid regularization of raw buoy location files.

Raw GPS fixes arrive at irregular instants with gaps. Everything downstream
(displacements, spectra, cross-buoy PCA) needs strictly uniform 30-minute
series anchored on the UTC half-hour marks, so this module rounds fixes onto
that grid, fills small gaps by interpolation, truncates at gaps longer than a
day, and intersects tracks onto a common time window.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

from .errors import EmptyFile, MalformedRecord, NoOverlap, TooShort

GRID_STEP_S = 1800
MAX_GAP_S = 86400


def normalize_lon(lon: float) -> float:
    """Map a longitude in degrees into (-180, 180]."""
    if -180.0 < lon <= 180.0:
        return lon  # bit-exact pass-through for in-range values
    r = ((lon + 180.0) % 360.0) - 180.0
    return 180.0 if r == -180.0 else r


def wrap_lon_delta(dlon: float) -> float:
    """Shortest-arc longitude difference in degrees, in (-180, 180]."""
    return normalize_lon(dlon)


@dataclass(frozen=True)
class Fix:
    """One timestamped position: UTC epoch seconds (int), degrees lat/lon."""

    t: int
    lat: float
    lon: float

    def __post_init__(self):
        if self.t < 0 or self.t != int(self.t):
            raise ValueError(f"time must be a non-negative integer, got {self.t!r}")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude out of range: {self.lat!r}")
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "lon", normalize_lon(float(self.lon)))
        object.__setattr__(self, "lat", float(self.lat))


@dataclass(frozen=True)
class Track:
    """Uniformly sampled position series for one buoy.

    Invariants enforced at construction: start on a half-hour mark,
    fixes[i].t == start + i*step_s with no holes, and at least two fixes.
    """

    id: str
    start: int
    fixes: tuple[Fix, ...]
    step_s: int = GRID_STEP_S

    def __post_init__(self):
        object.__setattr__(self, "fixes", tuple(self.fixes))
        if self.step_s != GRID_STEP_S:
            raise ValueError(f"grid spacing is fixed at {GRID_STEP_S} s")
        if self.start % self.step_s != 0:
            raise ValueError(f"start {self.start} is not on a half-hour mark")
        if len(self.fixes) < 2:
            raise TooShort(f"track {self.id!r} has {len(self.fixes)} fixes, need >= 2")
        for i, fix in enumerate(self.fixes):
            if fix.t != self.start + i * self.step_s:
                raise ValueError(
                    f"track {self.id!r}: fix {i} at t={fix.t}, expected {self.start + i * self.step_s}"
                )

    def __len__(self) -> int:
        return len(self.fixes)

    @property
    def end(self) -> int:
        return self.fixes[-1].t

    def slice(self, start: int, end: int) -> "Track":
        """Sub-track covering [start, end] inclusive; bounds must lie on the grid."""
        i0 = (start - self.start) // self.step_s
        i1 = (end - self.start) // self.step_s
        return Track(id=self.id, start=start, fixes=self.fixes[i0 : i1 + 1])


@dataclass(frozen=True)
class EnsembleWindow:
    """Tracks sliced to their maximal common time window (identical stamps)."""

    start: int
    end: int
    tracks: tuple[Track, ...]
    step_s: int = GRID_STEP_S

    @property
    def n_instants(self) -> int:
        return (self.end - self.start) // self.step_s + 1


class LocationFormat(Enum):
    RAW_LOCS = "rawlocs"
    GENERIC_CSV = "csv"


_CSV_HEADER_FIRST_FIELDS = {"timestamp", "timestamp_iso8601", "time", "datetime", "date"}


def parse_iso8601(text: str) -> int:
    """UTC epoch seconds from an ISO-8601 timestamp (naive means UTC)."""
    t = text.strip()
    if t.endswith(("Z", "z")):
        t = t[:-1] + "+00:00"
    dt = datetime.fromisoformat(t)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return round(dt.timestamp())


def _year_epoch(year: int) -> int:
    return int(datetime(year, 1, 1, tzinfo=timezone.utc).timestamp())


def _parse_generic_csv_line(line: str) -> Fix:
    fields = [f.strip() for f in line.split(",")]
    if len(fields) != 3:
        raise ValueError(f"expected 3 comma-separated fields, got {len(fields)}")
    t = parse_iso8601(fields[0])
    return Fix(t=t, lat=float(fields[1]), lon=float(fields[2]))


def _parse_rawlocs_line(line: str, day_origin: str) -> Fix:
    fields = line.split()
    if len(fields) != 4:
        raise ValueError(f"expected 4 whitespace-separated fields, got {len(fields)}")
    year = int(fields[0])
    day = float(fields[1])
    origin = 1.0 if day_origin == "one" else 0.0
    # Round to the nearest second: fractional-day arithmetic does not land
    # exactly on 30-minute marks in binary floating point.
    t = _year_epoch(year) + round((day - origin) * 86400.0)
    return Fix(t=t, lat=float(fields[3]), lon=float(fields[2]))


def parse_locations(
    content: bytes,
    fmt: LocationFormat,
    day_origin: str = "one",
) -> list[Fix]:
    """Parse a raw location file into fixes, in file order.

    Two formats are supported. RAW_LOCS lines hold
    ``year fractional_day_of_year longitude latitude`` separated by arbitrary
    whitespace, where under the default ``day_origin="one"`` convention day
    1.0 is Jan 1 00:00:00 UTC of the stated year (``"zero"`` shifts by one
    day). GENERIC_CSV lines hold ``timestamp_iso8601,lat,lon``. Lines whose
    first non-blank character is ``%`` or ``#`` are comments; a leading header
    row is recognized by its first field and skipped.

    Raises MalformedRecord for any unparseable non-comment line (the whole
    parse fails, never a silent partial ingest) and EmptyFile if no valid
    records remain.
    """
    if day_origin not in ("one", "zero"):
        raise ValueError(f"day_origin must be 'one' or 'zero', got {day_origin!r}")
    try:
        text = content.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRecord(0, f"file is not valid UTF-8: {exc}") from exc

    fixes: list[Fix] = []
    seen_data = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("%", "#")):
            continue
        if not seen_data and _is_header(line, fmt):
            continue
        seen_data = True
        try:
            if fmt is LocationFormat.GENERIC_CSV:
                fixes.append(_parse_generic_csv_line(line))
            else:
                fixes.append(_parse_rawlocs_line(line, day_origin))
        except (ValueError, OverflowError) as exc:
            raise MalformedRecord(line_no, str(exc)) from exc
    if not fixes:
        raise EmptyFile("no valid records")
    return fixes


def _is_header(line: str, fmt: LocationFormat) -> bool:
    if fmt is LocationFormat.GENERIC_CSV:
        first = line.split(",", 1)[0].strip().lower()
        return first in _CSV_HEADER_FIRST_FIELDS
    return line.split(None, 1)[0].lower() == "year"


def round_to_grid(fixes: list[Fix]) -> list[Fix]:
    """Round fix times to the nearest half-hour mark and deduplicate.

    Ties (exactly 15 min past a mark) round up. When several fixes land on
    the same grid instant, the one whose original time was closest wins;
    an equal-distance tie keeps the earlier original fix. Input must be
    sorted by time ascending; output is strictly increasing.
    """
    # grid time -> (distance, original t, fix)
    chosen: dict[int, tuple[int, int, Fix]] = {}
    for fix in fixes:
        q, r = divmod(fix.t, GRID_STEP_S)
        grid_t = (q + 1) * GRID_STEP_S if r >= GRID_STEP_S // 2 else q * GRID_STEP_S
        cand = (abs(fix.t - grid_t), fix.t, fix)
        prev = chosen.get(grid_t)
        if prev is None or cand[:2] < prev[:2]:
            chosen[grid_t] = cand
    return [
        Fix(t=grid_t, lat=c[2].lat, lon=c[2].lon)
        for grid_t, c in sorted(chosen.items())
    ]


def regularize(fixes: list[Fix], id: str) -> Track:
    """Build a hole-free track from gridded fixes.

    Scanning forward, the first gap strictly greater than 24 h truncates the
    track at the fix before the gap; shorter gaps are filled by linear
    interpolation at every missing half-hour instant. Latitude interpolates
    directly; longitude interpolates along the shortest arc so antimeridian
    crossings stay local. Raises TooShort if fewer than 2 fixes remain.
    """
    out: list[Fix] = []
    for fix in fixes:
        if not out:
            out.append(fix)
            continue
        prev = out[-1]
        gap = fix.t - prev.t
        if gap <= 0 or gap % GRID_STEP_S != 0:
            raise ValueError("fixes must be strictly increasing on the 1800 s grid")
        if gap > MAX_GAP_S:
            break
        dlon = wrap_lon_delta(fix.lon - prev.lon)
        n_steps = gap // GRID_STEP_S
        for j in range(1, n_steps):
            frac = j / n_steps
            out.append(
                Fix(
                    t=prev.t + j * GRID_STEP_S,
                    lat=prev.lat + frac * (fix.lat - prev.lat),
                    lon=normalize_lon(prev.lon + frac * dlon),
                )
            )
        out.append(fix)
    if len(out) < 2:
        raise TooShort(f"track {id!r} has {len(out)} usable fixes, need >= 2")
    return Track(id=id, start=out[0].t, fixes=tuple(out))


def align_tracks(tracks: list[Track]) -> EnsembleWindow:
    """Slice tracks to their maximal common window [max starts, min ends].

    All returned slices share identical time stamps. Raises NoOverlap when
    the common window holds fewer than 2 instants.
    """
    if not tracks:
        raise ValueError("need at least one track")
    start = max(t.start for t in tracks)
    end = min(t.end for t in tracks)
    if end - start < GRID_STEP_S:
        raise NoOverlap(f"common window [{start}, {end}] has fewer than 2 instants")
    return EnsembleWindow(
        start=start, end=end, tracks=tuple(t.slice(start, end) for t in tracks)
    )


def format_utc(t: int) -> str:
    return datetime.fromtimestamp(t, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def track_to_csv(track: Track) -> str:
    """Serialize a track in the GENERIC_CSV format (round-trip safe floats)."""
    lines = ["timestamp,lat,lon"]
    for fix in track.fixes:
        lines.append(f"{format_utc(fix.t)},{fix.lat!r},{fix.lon!r}")
    return "\n".join(lines) + "\n"
