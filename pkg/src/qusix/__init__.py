"""Mutually unbiased bases for photonic qusix states, simulated end to end."""

from .mub import (
    Basis,
    MubReport,
    MubSet,
    computational_basis,
    fourier_basis,
    oam_qutrit_mubs,
    overlap_matrix,
    polarization_mubs,
    qusix_mubs,
    tensor_basis,
    verify_mub_set,
)
from .optics import FieldGrid, GridSpec, OamSuperposition, grid_inner_product, synthesize_mode
from .search import SearchConfig, search_extension_vector, search_full_mub_set, unbiasedness_residual

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "FieldGrid",
    "GridSpec",
    "MubReport",
    "MubSet",
    "OamSuperposition",
    "SearchConfig",
    "computational_basis",
    "fourier_basis",
    "grid_inner_product",
    "oam_qutrit_mubs",
    "overlap_matrix",
    "polarization_mubs",
    "qusix_mubs",
    "search_extension_vector",
    "search_full_mub_set",
    "synthesize_mode",
    "tensor_basis",
    "unbiasedness_residual",
    "verify_mub_set",
]
