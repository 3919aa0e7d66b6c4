"""Spin-weighted, vector and tensor Slepian functions on a polar cap."""
from .cap_concentration import (
    PolarCap,
    SpinSlepianBasis,
    assemble_spin_basis,
    shannon_spin,
)
from .field_assembly import (
    RankedSlepianBasis,
    assemble_ranked_basis,
    eval_grid,
    eval_slepian,
    shannon_ranked,
)
from .spin_harmonics import SpinPoint, spin_Y, spin_column

__version__ = "0.1.0"

__all__ = [
    "PolarCap",
    "RankedSlepianBasis",
    "SpinPoint",
    "SpinSlepianBasis",
    "assemble_ranked_basis",
    "assemble_spin_basis",
    "eval_grid",
    "eval_slepian",
    "shannon_ranked",
    "shannon_spin",
    "spin_Y",
    "spin_column",
]
