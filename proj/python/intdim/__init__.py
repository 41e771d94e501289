"""Intrinsic dimension of point clouds: TwoNN, decimation, PCA baselines.

Matrices are 2-D numpy arrays (one row per point). Reports are the same
JSON documents the ``intdim`` CLI prints, returned as dicts.
"""

import json

from . import _intdim
from ._intdim import (
    SCHEMA_VERSION,
    ConfigError,
    DegenerateDataError,
    IntdimError,
    IoError,
    ParseError,
    ValidationError,
    dedupe,
    embed_orthogonal,
    fourier_lift,
    gaussian_surrogate,
    gen_manifold,
    load_matrix,
    min_id_bound,
    pearson,
    perturb_luminance,
    relative_depth,
    save_matrix,
    spearman,
    two_nearest,
)
from .manifest import load_schema, validate_manifest, write_manifest

__all__ = [
    "SCHEMA_VERSION", "ConfigError", "DegenerateDataError", "IntdimError", "IoError", "ParseError",
    "ValidationError", "dedupe", "decimate", "embed_orthogonal", "estimate", "estimate_ratios",
    "fourier_lift", "gaussian_surrogate", "gen_manifold", "load_matrix", "load_schema", "min_id_bound",
    "pearson", "perturb_luminance", "profile", "relative_depth", "save_matrix", "spearman", "spectrum",
    "two_nearest", "validate_manifest", "write_manifest",
]


def estimate(x, method="mle", subsample_fraction=0.9, repeats=20, discard_fraction=0.1, seed=0, threads=0):
    """Mean and std of the ID over `repeats` subsamples (as ``intdim estimate``)."""
    return json.loads(_intdim.estimate(x, method, subsample_fraction, repeats, discard_fraction, seed, threads))


def estimate_ratios(mu, method="mle", discard_fraction=0.1):
    """ID from precomputed ratios mu = r2 / r1 ("mle" or "cumulate")."""
    return json.loads(_intdim.estimate_ratios(list(map(float, mu)), method, discard_fraction))


def decimate(x, k_max=20, method="mle", rel_tol=0.1, discard_fraction=0.1, seed=0, threads=0):
    """ID versus sample size for k = k_max..1 disjoint folds, with a stability verdict."""
    return json.loads(_intdim.decimate(x, k_max, method, rel_tol, discard_fraction, seed, threads))


def spectrum(x, use_correlation=True, threshold=0.9):
    """PCA eigenspectrum and PC-ID at `threshold` of the variance."""
    return json.loads(_intdim.spectrum(x, use_correlation, threshold))


def profile(manifest, method="mle", subsample_fraction=0.9, repeats=20, discard_fraction=0.1, dedupe_tol=0.0,
            per_category=False, seed=0, threads=0):
    """ID of every checkpoint listed in a manifest file."""
    return json.loads(_intdim.profile(str(manifest), method, subsample_fraction, repeats, discard_fraction,
                                      dedupe_tol, per_category, seed, threads))
