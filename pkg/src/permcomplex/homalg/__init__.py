"""Homological algebra over R[G]: covers, resolutions, Ext, decompositions, exactness."""

from .complexes import (
    ChainComplex,
    ComplexError,
    CoveringHom,
    DivisibilityCheck,
    ExactnessCertificate,
    TowerCertificate,
    TowerComplex,
    check_exact,
    homology_at,
    tower_check,
)
from .decompose import (
    DecompositionError,
    DecompositionReport,
    FittingResult,
    ModuleRecipe,
    decompose_once,
    endomorphism_generators,
    Summand,
    fitting,
    ks_decompose,
    random_endomorphism,
    random_recipe,
)
from .projective import (
    CoverError,
    CoverResult,
    ExtComparison,
    FreeResolution,
    MultiplicityTable,
    ResolutionPrefix,
    ext_dim,
    ext_table,
    free_resolution,
    heller,
    heller_power,
    is_projective,
    minimal_resolution,
    projective_cover,
    stable_hom,
    top,
)
from .sequences import build_tower, d6_sequence, sequence_1, sequence_2, splice

__all__ = [
    "ChainComplex",
    "ComplexError",
    "CoverError",
    "CoverResult",
    "CoveringHom",
    "DecompositionError",
    "DecompositionReport",
    "DivisibilityCheck",
    "ExactnessCertificate",
    "ExtComparison",
    "FittingResult",
    "FreeResolution",
    "ModuleRecipe",
    "MultiplicityTable",
    "ResolutionPrefix",
    "Summand",
    "TowerCertificate",
    "TowerComplex",
    "build_tower",
    "check_exact",
    "d6_sequence",
    "decompose_once",
    "endomorphism_generators",
    "ext_dim",
    "ext_table",
    "fitting",
    "free_resolution",
    "heller",
    "heller_power",
    "homology_at",
    "is_projective",
    "ks_decompose",
    "minimal_resolution",
    "projective_cover",
    "random_endomorphism",
    "random_recipe",
    "sequence_1",
    "sequence_2",
    "splice",
    "stable_hom",
    "top",
    "tower_check",
]
