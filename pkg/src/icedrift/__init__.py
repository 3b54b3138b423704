"""Spectral and principal-component analysis of ice-tethered drifter tracks."""

from .errors import (
    BadRank,
    ConfigError,
    DegenerateColumn,
    EmptyFile,
    IcedriftError,
    InputError,
    MalformedRecord,
    NoConvergence,
    NonFiniteInput,
    NoOverlap,
    NumericalError,
    PoleDegenerate,
    ShapeMismatch,
    TooShort,
    WindowTooShort,
)
from .geodesy import (
    EARTH_RADIUS_KM,
    DisplacementSeries,
    displacement_series,
    geodesic_km,
    zonal_meridional,
)
from .ingest import (
    GRID_STEP_S,
    MAX_GAP_S,
    EnsembleWindow,
    Fix,
    LocationFormat,
    Track,
    align_tracks,
    parse_locations,
    regularize,
    round_to_grid,
)
from .pca import (
    EnsembleMatrix,
    PcaModel,
    correlation_matrix,
    eigendecompose_sym,
    ensemble_from_window,
    explained_variance,
    fit,
    pearson_r,
    project,
    reconstruct,
    rms_error,
    standardize,
)
from .regions import RegionLabel, classify, partition
from .spectral import (
    Spectrum,
    WindowWeights,
    find_peaks,
    frequency_axis,
    hann_window,
    spectrum_to_csv,
    windowed_dft,
)
from .synth import SynthParams, generate, generate_pair

__version__ = "0.1.0"

__all__ = [
    "BadRank",
    "ConfigError",
    "DegenerateColumn",
    "DisplacementSeries",
    "EARTH_RADIUS_KM",
    "EmptyFile",
    "EnsembleMatrix",
    "EnsembleWindow",
    "Fix",
    "GRID_STEP_S",
    "IcedriftError",
    "InputError",
    "LocationFormat",
    "MAX_GAP_S",
    "MalformedRecord",
    "NoConvergence",
    "NoOverlap",
    "NonFiniteInput",
    "NumericalError",
    "PcaModel",
    "PoleDegenerate",
    "RegionLabel",
    "ShapeMismatch",
    "Spectrum",
    "SynthParams",
    "TooShort",
    "Track",
    "WindowTooShort",
    "WindowWeights",
    "align_tracks",
    "classify",
    "correlation_matrix",
    "displacement_series",
    "eigendecompose_sym",
    "ensemble_from_window",
    "explained_variance",
    "find_peaks",
    "fit",
    "frequency_axis",
    "generate",
    "generate_pair",
    "geodesic_km",
    "hann_window",
    "parse_locations",
    "partition",
    "pearson_r",
    "project",
    "reconstruct",
    "regularize",
    "rms_error",
    "round_to_grid",
    "spectrum_to_csv",
    "standardize",
    "windowed_dft",
    "zonal_meridional",
]
