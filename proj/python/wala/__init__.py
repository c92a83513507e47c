"""Wavelet-latent 3D shape compression and generation toolkit."""

from ._wala import (  # noqa: F401
    AnalyticGaussianDenoiser,
    Codebook,
    ConfigError,
    DataError,
    DiffusibleTree,
    FitError,
    GeometryError,
    GridSpec,
    ImportanceSet,
    LatentGrid,
    LinearCodec,
    NoiseSchedule,
    ParameterError,
    SdfGrid,
    WaveletDecomposition,
    adaptive_block_weights,
    adaptive_recon_loss,
    analysis_sides,
    chamfer,
    compression_ratio,
    cosine_schedule,
    decode,
    dwt3,
    encode,
    fit_codebook,
    fit_codec,
    forward_noise,
    idwt3,
    importance_set,
    iou,
    make_step_list,
    marching_cubes,
    occupancy,
    pack_tree,
    quantize,
    sample_analytic,
    sample_surface_points,
    sdf_from_shape,
    snap,
    subband_filter,
    unpack_tree,
    voxelize_mesh,
)

__all__ = [name for name in dir() if not name.startswith("_")]
