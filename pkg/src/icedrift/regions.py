"""Geographic split of tracks by deployment location.

A track belongs to the Amerasian section when its first retained fix lies in
the window 180-120 W, 65-85 N (all bounds inclusive); everything else is
Eurasian.
"""

from __future__ import annotations

from enum import Enum

from .ingest import Track


class RegionLabel(Enum):
    AMERASIAN = "amerasian"
    EURASIAN = "eurasian"


def classify(track: Track) -> RegionLabel:
    """Label a track by its deployment (first) fix."""
    first = track.fixes[0]
    lon = first.lon
    if lon == 180.0:
        # Longitudes normalize into (-180, 180], so the 180 W corner of the
        # window arrives as +180; treat it as -180.
        lon = -180.0
    if -180.0 <= lon <= -120.0 and 65.0 <= first.lat <= 85.0:
        return RegionLabel.AMERASIAN
    return RegionLabel.EURASIAN


def partition(tracks: list[Track]) -> tuple[list[Track], list[Track]]:
    """Order-preserving split into (amerasian, eurasian) lists."""
    amerasian = [t for t in tracks if classify(t) is RegionLabel.AMERASIAN]
    eurasian = [t for t in tracks if classify(t) is RegionLabel.EURASIAN]
    return amerasian, eurasian
