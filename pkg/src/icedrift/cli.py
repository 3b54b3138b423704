"""Command-line pipeline: ingest, spectrum, pca, synth, report.

All commands are deterministic: inputs are processed in sorted order, tracks
are ordered by id, floats are serialized with their shortest round-trip
representation and JSON keys are sorted, so identical inputs and options
produce byte-identical output trees.

Exit codes: 0 success, 1 input error, 2 configuration error, 3 numerical
failure. Errors are reported as one JSON object per line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import pca as pca_mod
from .errors import (
    ConfigError,
    IcedriftError,
    InputError,
    NoOverlap,
    NumericalError,
)
from .geodesy import displacement_series
from .ingest import (
    Fix,
    LocationFormat,
    Track,
    align_tracks,
    format_utc,
    parse_iso8601,
    parse_locations,
    regularize,
    round_to_grid,
    track_to_csv,
)
from .regions import classify, partition
from .spectral import find_peaks, spectrum_to_csv, windowed_dft
from .synth import SynthParams, generate, generate_pair

DEFAULTS = {
    "format": "csv",
    "day_origin": "one",
    "region": "auto",
    "channel": "total",
    "k": 2,
    "prominence": 3.0,
    "out": "icedrift-out",
    "origin_lat": 80.0,
    "origin_lon": -150.0,
    "start": "2020-01-01T00:00:00Z",
    "mean_u": 0.0,
    "mean_v": 0.0,
    "tide_amp": 0.0,
    "tide_freq": 22.6,
    "tide_phase": 0.0,
    "noise_sigma": 0.0,
    "seed": 0,
}

_CONVERTERS = {
    "input": lambda v: [s for s in (p.strip() for p in v.split(",")) if s],
    "k": int,
    "seed": int,
    "steps": int,
    "pair_seed": int,
    "prominence": float,
    "origin_lat": float,
    "origin_lon": float,
    "mean_u": float,
    "mean_v": float,
    "tide_amp": float,
    "tide_freq": float,
    "tide_phase": float,
    "noise_sigma": float,
    "pair_noise_sigma": float,
}

_CHOICES = {
    "format": ("csv", "rawlocs"),
    "day_origin": ("one", "zero"),
    "region": ("auto", "amerasian", "eurasian", "all"),
    "channel": ("total", "zonal", "meridional"),
}


@dataclass
class RunConfig:
    """Merged options for one command (flags beat config file beat defaults)."""

    command: str
    inputs: list[Path] = field(default_factory=list)
    fmt: str = "csv"
    day_origin: str = "one"
    region: str = "auto"
    channel: str = "total"
    k: int = 2
    prominence: float = 3.0
    out: Path = Path("icedrift-out")
    # synth-only options
    track_id: str | None = None
    steps: int | None = None
    origin_lat: float = 80.0
    origin_lon: float = -150.0
    start: str = "2020-01-01T00:00:00Z"
    mean_u: float = 0.0
    mean_v: float = 0.0
    tide_amp: float = 0.0
    tide_freq: float = 22.6
    tide_phase: float = 0.0
    noise_sigma: float = 0.0
    seed: int = 0
    pair_seed: int | None = None
    pair_noise_sigma: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.prominence <= 1.0:
            raise ConfigError(f"prominence ratio must be > 1, got {self.prominence}")
        for key in ("fmt", "day_origin", "region", "channel"):
            option = "format" if key == "fmt" else key
            value = getattr(self, key)
            if value not in _CHOICES[option]:
                raise ConfigError(f"{option} must be one of {_CHOICES[option]}, got {value!r}")


def _emit_error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _collect_inputs(paths: list[Path]) -> list[Path]:
    files: list[Path] = []
    for path in paths:
        if path.is_dir():
            files.extend(
                p for p in sorted(path.iterdir()) if p.is_file() and not p.name.startswith(".")
            )
        elif path.is_file():
            files.append(path)
        else:
            raise InputError(f"input path not found: {path}")
    return sorted(files)


def _load_gridded_tracks(inputs: list[Path]) -> list[Track]:
    """Read GENERIC_CSV files produced by the ingest stage back into tracks."""
    tracks = []
    for path in inputs:
        fixes = parse_locations(path.read_bytes(), LocationFormat.GENERIC_CSV)
        try:
            tracks.append(Track(id=path.stem, start=fixes[0].t, fixes=tuple(fixes)))
        except ValueError as exc:
            raise InputError(f"{path}: not a gridded track file: {exc}") from exc
    tracks.sort(key=lambda t: t.id)
    return tracks


def cmd_ingest(cfg: RunConfig) -> int:
    files = _collect_inputs(cfg.inputs)
    if not files:
        raise InputError("no input files found")
    fmt = LocationFormat(cfg.fmt)
    entries = []
    errors = []
    for path in files:
        try:
            fixes = parse_locations(path.read_bytes(), fmt, day_origin=cfg.day_origin)
            raw_count = len(fixes)
            fixes.sort(key=lambda f: f.t)
            gridded = round_to_grid(fixes)
            track = regularize(gridded, id=path.stem)
        except IcedriftError as exc:
            _emit_error(type(exc).__name__, str(exc), file=str(path))
            errors.append(
                {"error": type(exc).__name__, "file": str(path), "message": str(exc)}
            )
            continue
        kept_gridded = sum(1 for f in gridded if f.t <= track.end)
        truncated = kept_gridded < len(gridded)
        entries.append(
            {
                "id": track.id,
                "region": classify(track).value,
                "raw_fixes": raw_count,
                "gridded_fixes": len(gridded),
                "retained_fixes": len(track),
                "interpolated_fixes": len(track) - kept_gridded,
                "truncated_at": format_utc(track.end) if truncated else None,
                "start": format_utc(track.start),
                "end": format_utc(track.end),
            }
        )
        _write(cfg.out / "gridded" / f"{track.id}.csv", track_to_csv(track))
    entries.sort(key=lambda e: e["id"])
    summary = {"errors": errors, "tracks": entries}
    _write(cfg.out / "ingest_summary.json", _json_text(summary))
    return 1 if errors else 0


def cmd_spectrum(cfg: RunConfig) -> int:
    tracks = _load_gridded_tracks(_collect_inputs(cfg.inputs))
    if not tracks:
        raise InputError("no input files found")
    results = []
    skipped = []
    for track in tracks:
        if len(track) < 3:
            _emit_error("TooShort", f"track {track.id!r} too short for a spectrum", id=track.id)
            skipped.append({"id": track.id, "reason": "too_short", "fixes": len(track)})
            continue
        series = displacement_series(track)
        peaks = {}
        for channel in ("zonal", "meridional"):
            spec = windowed_dft(series.channel(channel), series.step_s)
            _write(cfg.out / "spectra" / f"{track.id}_{channel}.csv", spectrum_to_csv(spec))
            peaks[channel] = [list(p) for p in find_peaks(spec, cfg.prominence)]
        results.append({"id": track.id, "region": classify(track).value, "peaks": peaks})
    payload = {"prominence_ratio": cfg.prominence, "tracks": results, "skipped": skipped}
    _write(cfg.out / "spectra_peaks.json", _json_text(payload))
    return 0


def _region_groups(tracks: list[Track], region: str) -> dict[str, list[Track]]:
    if region == "all":
        return {"all": tracks}
    amerasian, eurasian = partition(tracks)
    groups = {"amerasian": amerasian, "eurasian": eurasian}
    if region != "auto":
        return {region: groups[region]}
    return {name: group for name, group in groups.items() if group}


def _run_region_pca(cfg: RunConfig, name: str, tracks: list[Track]) -> dict:
    usable = [t for t in tracks if len(t) >= 3]
    if len(usable) < 2:
        raise InputError(f"region {name!r} has {len(usable)} usable tracks, need >= 2")
    window = align_tracks(usable)
    if window.n_instants < 3:
        raise NoOverlap(f"region {name!r}: common window too short for displacements")
    ensemble = pca_mod.ensemble_from_window(window, channel=cfg.channel)
    model = pca_mod.fit(ensemble)
    z, _, _ = pca_mod.standardize(ensemble.x, ensemble.ids)
    scores = pca_mod.project(z, model.eigvecs, cfg.k)
    recon = pca_mod.reconstruct(scores, model.eigvecs, cfg.k, model.mu, model.sigma)
    rms = pca_mod.rms_error(ensemble.x, recon)
    corr = pca_mod.correlation_matrix(z)

    report = {
        "region": name,
        "channel": cfg.channel,
        "k": cfg.k,
        "n_samples": int(ensemble.x.shape[0]),
        "window": {"start": format_utc(window.start), "end": format_utc(window.end)},
        "ids": list(ensemble.ids),
        "mu_km": {i: float(v) for i, v in zip(ensemble.ids, model.mu)},
        "sigma_km": {i: float(v) for i, v in zip(ensemble.ids, model.sigma)},
        "eigvals": [float(v) for v in model.eigvals],
        "explained_cumulative": [float(v) for v in model.explained],
        "explained_at_k": pca_mod.explained_variance(model.eigvals, cfg.k),
        "correlation": [[float(v) for v in row] for row in corr],
        "rms_km": {str(cfg.k): {i: float(v) for i, v in zip(ensemble.ids, rms)}},
    }
    base = cfg.out / "pca" / name
    _write(base / "report.json", _json_text(report))
    times = ensemble.times
    for j, track_id in enumerate(ensemble.ids):
        lines = ["t_utc,displacement_km"]
        lines.extend(
            f"{format_utc(int(t))},{float(v)!r}" for t, v in zip(times, recon[:, j])
        )
        _write(base / "reconstructed" / f"{track_id}.csv", "\n".join(lines) + "\n")
        spec = windowed_dft(recon[:, j], window.step_s)
        _write(base / "spectra" / f"{track_id}_{cfg.channel}.csv", spectrum_to_csv(spec))
    return {"region": name, "ids": list(ensemble.ids)}


def cmd_pca(cfg: RunConfig) -> int:
    tracks = _load_gridded_tracks(_collect_inputs(cfg.inputs))
    if not tracks:
        raise InputError("no input files found")
    groups = _region_groups(tracks, cfg.region)
    processed = []
    skipped = []
    for name in sorted(groups):
        if cfg.region == "auto":
            try:
                processed.append(_run_region_pca(cfg, name, groups[name]))
            except InputError as exc:
                _emit_error(type(exc).__name__, str(exc), region=name)
                skipped.append({"region": name, "reason": str(exc)})
        else:
            processed.append(_run_region_pca(cfg, name, groups[name]))
    if not processed:
        raise InputError("no region had enough overlapping tracks for PCA")
    summary = {"processed": processed, "skipped": skipped}
    _write(cfg.out / "pca" / "pca_summary.json", _json_text(summary))
    return 0


def cmd_synth(cfg: RunConfig) -> int:
    if cfg.steps is None:
        raise ConfigError("synth requires --steps")
    if (cfg.pair_seed is None) != (cfg.pair_noise_sigma is None):
        raise ConfigError("--pair-seed and --pair-noise-sigma go together")
    try:
        origin = Fix(t=parse_iso8601(cfg.start), lat=cfg.origin_lat, lon=cfg.origin_lon)
        params = SynthParams(
            origin=origin,
            duration_steps=cfg.steps,
            mean_u=cfg.mean_u,
            mean_v=cfg.mean_v,
            tide_amp_km=cfg.tide_amp,
            tide_freq_uhz=cfg.tide_freq,
            tide_phase_rad=cfg.tide_phase,
            noise_sigma_km=cfg.noise_sigma,
            seed=cfg.seed,
        )
        if cfg.pair_seed is not None:
            base = cfg.track_id if cfg.track_id is not None else f"synth-{cfg.seed}"
            tracks = generate_pair(
                params,
                noise_sigma_b=cfg.pair_noise_sigma,
                seed_b=cfg.pair_seed,
                id_a=f"{base}-a",
                id_b=f"{base}-b",
            )
        else:
            tracks = (generate(params, id=cfg.track_id),)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for track in tracks:
        _write(cfg.out / f"{track.id}.csv", track_to_csv(track))
    return 0


def cmd_report(cfg: RunConfig) -> int:
    rc_ingest = cmd_ingest(cfg)
    gridded = cfg.out / "gridded"
    if not gridded.is_dir() or not any(gridded.iterdir()):
        return rc_ingest or 1
    stage_cfg = RunConfig(
        command=cfg.command,
        inputs=[gridded],
        fmt="csv",
        day_origin=cfg.day_origin,
        region=cfg.region,
        channel=cfg.channel,
        k=cfg.k,
        prominence=cfg.prominence,
        out=cfg.out,
    )
    rc_spectrum = cmd_spectrum(stage_cfg)
    rc_pca = cmd_pca(stage_cfg)
    for rc in (rc_ingest, rc_spectrum, rc_pca):
        if rc:
            return rc
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="icedrift",
        description="Drifter-track analysis: grid regularization, displacement spectra, cross-buoy PCA.",
    )
    parser.add_argument("--config", type=Path, help="key=value config file; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *names):
        if "input" in names:
            p.add_argument("--input", "-i", nargs="+", help="input files or directories")
        if "format" in names:
            p.add_argument("--format", choices=_CHOICES["format"], dest="format")
        if "day_origin" in names:
            p.add_argument("--day-origin", choices=_CHOICES["day_origin"], dest="day_origin")
        if "region" in names:
            p.add_argument("--region", choices=_CHOICES["region"])
        if "channel" in names:
            p.add_argument("--channel", choices=_CHOICES["channel"])
        if "k" in names:
            p.add_argument("--k", type=int)
        if "prominence" in names:
            p.add_argument("--prominence", type=float, help="peak prominence ratio")
        p.add_argument("--out", "-o", type=Path, help="output directory")

    p_ingest = sub.add_parser("ingest", help="regularize raw location files onto the 30-min grid")
    add_common(p_ingest, "input", "format", "day_origin")

    p_spectrum = sub.add_parser("spectrum", help="windowed DFT spectra of gridded tracks")
    add_common(p_spectrum, "input", "prominence")

    p_pca = sub.add_parser("pca", help="cross-buoy PCA with reconstruction diagnostics")
    add_common(p_pca, "input", "region", "channel", "k")

    p_synth = sub.add_parser("synth", help="write synthetic drift tracks as CSV")
    add_common(p_synth)
    p_synth.add_argument("--id", dest="track_id")
    p_synth.add_argument("--steps", type=int)
    p_synth.add_argument("--origin-lat", type=float, dest="origin_lat")
    p_synth.add_argument("--origin-lon", type=float, dest="origin_lon")
    p_synth.add_argument("--start", help="first fix time, ISO-8601 UTC on a half-hour mark")
    p_synth.add_argument("--mean-u", type=float, dest="mean_u", help="mean east drift, km/step")
    p_synth.add_argument("--mean-v", type=float, dest="mean_v", help="mean north drift, km/step")
    p_synth.add_argument("--tide-amp", type=float, dest="tide_amp", help="tidal amplitude, km/step")
    p_synth.add_argument("--tide-freq", type=float, dest="tide_freq", help="tidal frequency, uHz")
    p_synth.add_argument("--tide-phase", type=float, dest="tide_phase", help="tidal phase, rad")
    p_synth.add_argument("--noise-sigma", type=float, dest="noise_sigma", help="noise sigma, km/step")
    p_synth.add_argument("--seed", type=int)
    p_synth.add_argument("--pair-seed", type=int, dest="pair_seed")
    p_synth.add_argument("--pair-noise-sigma", type=float, dest="pair_noise_sigma")

    p_report = sub.add_parser("report", help="run ingest, spectrum and pca into one output tree")
    add_common(p_report, "input", "format", "day_origin", "region", "channel", "k", "prominence")
    return parser


def _load_config_file(path: Path) -> dict:
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    known = set(DEFAULTS) | set(_CONVERTERS) | {"input", "track_id"}
    values = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in known:
            raise ConfigError(f"{path}:{line_no}: unknown option {key!r}")
        values[key] = value.strip()
    return values


def _merged(ns: argparse.Namespace, file_cfg: dict, key: str):
    value = getattr(ns, key, None)
    if value is None and key in file_cfg:
        raw = file_cfg[key]
        convert = _CONVERTERS.get(key)
        try:
            value = convert(raw) if convert else raw
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    if value is None:
        value = DEFAULTS.get(key)
    return value


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    file_cfg = _load_config_file(ns.config) if ns.config else {}
    inputs = _merged(ns, file_cfg, "input") or []
    return RunConfig(
        command=ns.command,
        inputs=[Path(p) for p in inputs],
        fmt=_merged(ns, file_cfg, "format"),
        day_origin=_merged(ns, file_cfg, "day_origin"),
        region=_merged(ns, file_cfg, "region"),
        channel=_merged(ns, file_cfg, "channel"),
        k=_merged(ns, file_cfg, "k"),
        prominence=_merged(ns, file_cfg, "prominence"),
        out=Path(_merged(ns, file_cfg, "out")),
        track_id=_merged(ns, file_cfg, "track_id"),
        steps=_merged(ns, file_cfg, "steps"),
        origin_lat=_merged(ns, file_cfg, "origin_lat"),
        origin_lon=_merged(ns, file_cfg, "origin_lon"),
        start=_merged(ns, file_cfg, "start"),
        mean_u=_merged(ns, file_cfg, "mean_u"),
        mean_v=_merged(ns, file_cfg, "mean_v"),
        tide_amp=_merged(ns, file_cfg, "tide_amp"),
        tide_freq=_merged(ns, file_cfg, "tide_freq"),
        tide_phase=_merged(ns, file_cfg, "tide_phase"),
        noise_sigma=_merged(ns, file_cfg, "noise_sigma"),
        seed=_merged(ns, file_cfg, "seed"),
        pair_seed=_merged(ns, file_cfg, "pair_seed"),
        pair_noise_sigma=_merged(ns, file_cfg, "pair_noise_sigma"),
    )


_COMMANDS = {
    "ingest": cmd_ingest,
    "spectrum": cmd_spectrum,
    "pca": cmd_pca,
    "synth": cmd_synth,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config_from_args(ns)
        return _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2
    except NumericalError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 3
    except InputError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except OSError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 1
    except ValueError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
