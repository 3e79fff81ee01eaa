"""Coherence information, discord and coarsening strings for finite-dimensional states."""

from .errors import (
    BlocksDoNotCommute,
    DimensionMismatch,
    DiscordKitError,
    InvalidObservable,
    InvalidState,
    InvariantViolation,
    NotDistribution,
    UnknownFixture,
    UnsupportedDimension,
)
from .states import BipartiteState, DensityMatrix, Mixture, Observable, TripartiteState
from .measures import (
    coherence_information,
    discord,
    identity_tolerance,
    mutual_information,
    mutual_information_decomposition,
    relative_entropy,
    shannon_entropy,
    von_neumann_entropy,
)
from .coarsening import build_chain
from .zerodiscord import Kind, classify
from .measurement import ApparatusSpec, premeasure

__version__ = "0.1.0"

__all__ = [
    "ApparatusSpec",
    "BipartiteState",
    "BlocksDoNotCommute",
    "DensityMatrix",
    "DimensionMismatch",
    "DiscordKitError",
    "InvalidObservable",
    "InvalidState",
    "InvariantViolation",
    "Kind",
    "Mixture",
    "NotDistribution",
    "Observable",
    "TripartiteState",
    "UnknownFixture",
    "UnsupportedDimension",
    "build_chain",
    "classify",
    "coherence_information",
    "discord",
    "identity_tolerance",
    "mutual_information",
    "mutual_information_decomposition",
    "premeasure",
    "relative_entropy",
    "shannon_entropy",
    "von_neumann_entropy",
]
