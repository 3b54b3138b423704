"""Synthetic drift tracks: mean drift + tidal oscillation + Gaussian noise.

The generator is the package's end-to-end oracle: per-step east/north
displacements are built analytically, then integrated into positions by
inverting the tangent-plane decomposition used for real tracks, so running
the forward displacement computation on a generated track recovers the
analytic inputs.

Reproducibility contract (fixed forever): the noise stream is NumPy's
Generator(PCG64(seed)) and the draws are a single standard_normal((steps, 2))
block scaled by noise_sigma_km, column 0 = east, column 1 = north. The tidal
phase is evaluated at t = i * step_s seconds relative to the first fix.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import PoleDegenerate
from .geodesy import KM_PER_DEG
from .ingest import GRID_STEP_S, Fix, Track, normalize_lon

SYNTH_POLE_LIMIT_DEG = 89.99


@dataclass(frozen=True)
class SynthParams:
    """Inputs of one synthetic track; displacements are km per 30-min step."""

    origin: Fix
    duration_steps: int
    mean_u: float = 0.0
    mean_v: float = 0.0
    tide_amp_km: float = 0.0
    tide_freq_uhz: float = 22.6
    tide_phase_rad: float = 0.0
    noise_sigma_km: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.duration_steps < 2:
            raise ValueError("duration_steps must be >= 2")
        if self.tide_amp_km < 0.0 or self.noise_sigma_km < 0.0:
            raise ValueError("amplitudes must be non-negative")
        if not 0.0 <= self.tide_freq_uhz <= 1e6 / (2 * GRID_STEP_S):
            raise ValueError("tide frequency must lie in [0, Nyquist]")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def step_displacements(params: SynthParams) -> np.ndarray:
    """Analytic (east, north) km per step, shape (duration_steps, 2)."""
    steps = params.duration_steps
    t_rel = GRID_STEP_S * np.arange(steps, dtype=float)
    phase = 2.0 * np.pi * params.tide_freq_uhz * 1e-6 * t_rel + params.tide_phase_rad
    rng = np.random.Generator(np.random.PCG64(params.seed))
    noise = rng.standard_normal((steps, 2)) * params.noise_sigma_km
    d = np.empty((steps, 2))
    d[:, 0] = params.mean_u + params.tide_amp_km * np.sin(phase) + noise[:, 0]
    d[:, 1] = params.mean_v + params.tide_amp_km * np.cos(phase) + noise[:, 1]
    return d


def _integrate(origin: Fix, d: np.ndarray, id: str) -> Track:
    """Turn per-step (east, north) km into a track by inverting the
    tangent-plane decomposition at each step's mid latitude."""
    lat = origin.lat + np.concatenate(([0.0], np.cumsum(d[:, 1]))) / KM_PER_DEG
    if np.any(np.abs(lat) > SYNTH_POLE_LIMIT_DEG):
        raise PoleDegenerate(f"integrated track exceeds {SYNTH_POLE_LIMIT_DEG} deg latitude")
    lat_mean = (lat[:-1] + lat[1:]) / 2.0
    dlon = d[:, 0] / (KM_PER_DEG * np.cos(np.radians(lat_mean)))
    lon_raw = origin.lon + np.concatenate(([0.0], np.cumsum(dlon)))
    fixes = tuple(
        Fix(t=origin.t + i * GRID_STEP_S, lat=float(lat[i]), lon=normalize_lon(float(lon_raw[i])))
        for i in range(len(lat))
    )
    return Track(id=id, start=origin.t, fixes=fixes)


def generate(params: SynthParams, id: str | None = None) -> Track:
    """Deterministic synthetic track of duration_steps + 1 fixes."""
    if params.origin.t % GRID_STEP_S != 0:
        raise ValueError("origin time must sit on a half-hour mark")
    return _integrate(
        params.origin,
        step_displacements(params),
        id if id is not None else f"synth-{params.seed}",
    )


def generate_pair(
    params: SynthParams,
    noise_sigma_b: float,
    seed_b: int,
    id_a: str | None = None,
    id_b: str | None = None,
) -> tuple[Track, Track]:
    """Two tracks sharing mean + tide but with independent noise streams."""
    base = f"synth-{params.seed}"
    params_b = dataclasses.replace(params, noise_sigma_km=noise_sigma_b, seed=seed_b)
    return (
        generate(params, id=id_a if id_a is not None else f"{base}-a"),
        generate(params_b, id=id_b if id_b is not None else f"{base}-b"),
    )
