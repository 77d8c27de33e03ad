"""Secret-key agreement from a Gaussian source observed by an eavesdropper.

X is the enrolled identifier, Y the noisy authentication measurement and Z
the eavesdropper's side information. The package computes the
key / storage / privacy-leakage regions, checks the identities behind them
numerically and simulates a finite-length random-binning protocol.
"""

from .errors import (
    DegenerateChannel,
    GaussianSKAError,
    InvalidAlpha,
    InvalidParams,
    LengthMismatch,
    NotPSD,
    OutOfRange,
    RatesInfeasible,
    TooLarge,
    Underpowered,
    WrongOrder,
)
from .info_calc import MIBundle, TestChannel, closed_form_mi, gaussian_cmi, mc_mi_estimate, mi_bundle
from .region import (
    BoundarySample,
    ModelKind,
    RateTuple,
    boundary_point,
    degenerate_region,
    is_achievable,
    membership_witness,
    rs_supremum,
    trace_boundary,
)
from .source_model import (
    ChannelOrder,
    CovarianceVariant,
    SourceParams,
    classify,
    degraded_covariance,
    original_covariance,
    sample_joint,
)

__version__ = "0.1.0"

__all__ = [
    "MIBundle",
    "TestChannel",
    "closed_form_mi",
    "gaussian_cmi",
    "mc_mi_estimate",
    "mi_bundle",
    "DegenerateChannel",
    "GaussianSKAError",
    "InvalidAlpha",
    "InvalidParams",
    "LengthMismatch",
    "NotPSD",
    "OutOfRange",
    "RatesInfeasible",
    "TooLarge",
    "Underpowered",
    "WrongOrder",
    "BoundarySample",
    "ModelKind",
    "RateTuple",
    "boundary_point",
    "degenerate_region",
    "is_achievable",
    "membership_witness",
    "rs_supremum",
    "trace_boundary",
    "ChannelOrder",
    "CovarianceVariant",
    "SourceParams",
    "classify",
    "degraded_covariance",
    "original_covariance",
    "sample_joint",
]
