"""Hann-windowed DFT of displacement series with a microhertz axis.

Conventions, fixed across the package: the window is applied
multiplicatively (y[n] = x[n] * w[n]) and the transform is normalized by
1/N, so a constant series of value c yields a DC amplitude of
c * (N-1) / (2N). No window-power compensation is applied; amplitudes of
sinusoids therefore carry the Hann coherent gain of about 0.5. The power
density view is one-sided and denominated in km^2/uHz so that summing
psd * bin_width recovers the mean windowed power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput, WindowTooShort


@dataclass(frozen=True)
class WindowWeights:
    """Taper weights of length n: zero at both ends, symmetric, in [0, 1]."""

    n: int
    w: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.w, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)
        if len(self.w) != self.n:
            raise ValueError("weight array length must equal n")


@dataclass(frozen=True)
class Spectrum:
    """One-sided spectrum of an N-point series sampled every step_s seconds.

    All arrays have floor(N/2) + 1 entries; bin k sits at k/(N*step_s) Hz,
    expressed in uHz.
    """

    n: int
    step_s: int
    freq_uhz: np.ndarray
    amplitude_km: np.ndarray
    psd_km2_per_uhz: np.ndarray

    def __post_init__(self):
        n_bins = self.n // 2 + 1
        for name in ("freq_uhz", "amplitude_km", "psd_km2_per_uhz"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            if len(arr) != n_bins:
                raise ValueError(f"{name} must have {n_bins} entries")
        if self.freq_uhz[0] != 0.0:
            raise ValueError("first bin must be DC")
        if np.any(self.amplitude_km < 0.0) or np.any(self.psd_km2_per_uhz < 0.0):
            raise ValueError("amplitude and power density must be non-negative")

    @property
    def nyquist_uhz(self) -> float:
        return 1e6 / (2.0 * self.step_s)


def hann_window(n: int) -> WindowWeights:
    """Raised-cosine taper w[i] = 0.5 - 0.5*cos(2*pi*i/(n-1)), i = 0..n-1.

    Built by mirroring the first half so w[i] == w[n-1-i] holds exactly and
    both endpoints are exactly zero.
    """
    if n < 2:
        raise WindowTooShort(f"window needs n >= 2, got {n}")
    w = np.empty(n, dtype=float)
    half = (n + 1) // 2
    i = np.arange(half, dtype=float)
    w[:half] = 0.5 - 0.5 * np.cos(2.0 * np.pi * i / (n - 1))
    w[0] = 0.0
    w[n - half :] = w[:half][::-1]
    return WindowWeights(n=n, w=w)


def frequency_axis(n: int, step_s: int) -> np.ndarray:
    """Bin centre frequencies in uHz: k / (n * step_s) * 1e6, k = 0..n//2."""
    k = np.arange(n // 2 + 1, dtype=float)
    return k * 1e6 / (n * step_s)


def windowed_dft(x, step_s: int) -> Spectrum:
    """Hann-windowed, 1/N-normalized one-sided DFT of a real series.

    amplitude_km[k] = |(1/N) * sum_n x[n] w[n] exp(-2i pi k n / N)| and
    psd_km2_per_uhz[k] = c_k * amplitude^2 * N * step_s * 1e-6, with c_k = 2
    except at DC and (for even N) at Nyquist, where the two-sided spectrum
    does not fold.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("input must be one-dimensional")
    n = len(x)
    w = hann_window(n).w
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("input contains NaN or infinity")
    if step_s <= 0:
        raise ValueError("step_s must be positive")
    coeff = np.fft.rfft(x * w) / n
    amplitude = np.abs(coeff)
    fold = np.full(len(coeff), 2.0)
    fold[0] = 1.0
    if n % 2 == 0:
        fold[-1] = 1.0
    psd = fold * amplitude**2 * (n * step_s * 1e-6)
    return Spectrum(
        n=n,
        step_s=step_s,
        freq_uhz=frequency_axis(n, step_s),
        amplitude_km=amplitude,
        psd_km2_per_uhz=psd,
    )


def find_peaks(spec: Spectrum, min_prominence_ratio: float) -> list[tuple[float, float]]:
    """Prominent strict local maxima of the power density, DC bin eligible.

    A peak is kept when its value is at least min_prominence_ratio times the
    larger of the valley minima separating it from its neighbouring peaks
    (or from the array edge). Returned sorted by descending power.
    """
    p = spec.psd_km2_per_uhz
    n = len(p)
    idx = []
    for i in range(n):
        higher_than_left = i > 0 and p[i] > p[i - 1]
        higher_than_right = i < n - 1 and p[i] > p[i + 1]
        if i == 0:
            is_peak = higher_than_right
        elif i == n - 1:
            is_peak = higher_than_left
        else:
            is_peak = higher_than_left and higher_than_right
        if is_peak:
            idx.append(i)
    kept = []
    for j, i in enumerate(idx):
        prev_peak = idx[j - 1] if j > 0 else None
        next_peak = idx[j + 1] if j + 1 < len(idx) else None
        valleys = []
        left_seg = p[(0 if prev_peak is None else prev_peak + 1) : i]
        if len(left_seg):
            valleys.append(left_seg.min())
        right_seg = p[i + 1 : (n if next_peak is None else next_peak)]
        if len(right_seg):
            valleys.append(right_seg.min())
        threshold = min_prominence_ratio * max(valleys) if valleys else 0.0
        if p[i] >= threshold:
            kept.append((float(spec.freq_uhz[i]), float(p[i])))
    kept.sort(key=lambda fp: (-fp[1], fp[0]))
    return kept


def spectrum_to_csv(spec: Spectrum) -> str:
    """CSV serialization with round-trip-safe (shortest repr) floats."""
    lines = ["freq_uhz,amplitude_km,psd_km2_per_uhz"]
    for f, a, p in zip(spec.freq_uhz, spec.amplitude_km, spec.psd_km2_per_uhz):
        lines.append(f"{float(f)!r},{float(a)!r},{float(p)!r}")
    return "\n".join(lines) + "\n"
