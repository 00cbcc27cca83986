"""Grassmann-manifold surrogates for parametric POD bases."""

from ._core import (
    BallViolationError,
    BeamSpec,
    BurgersSpec,
    Chart,
    CutLocusError,
    DimensionError,
    Ensemble,
    Error,
    FormatError,
    InstabilityError,
    InterpModel,
    InvalidArgument,
    NonFiniteError,
    OutOfChartError,
    PodBasis,
    SolverFailure,
    TrainConfig,
    WaveSpec,
    compute_pod,
    embed,
    exp_map,
    fit,
    geodesic_distance,
    log_map,
    principal_angles,
    read_snapshot_file,
    relative_error,
    run_beam,
    run_burgers,
    run_wave,
    select_reference,
    split_mod3,
    wrap_back,
    write_snapshot_file,
)

__all__ = [name for name in dir() if not name.startswith("_")]
