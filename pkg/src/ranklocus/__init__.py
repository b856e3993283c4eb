"""Constant-rank matrices of linear forms from morphisms of linear complexes."""
from .chern import ChernPoly, chern_of_complex_kernel, chern_of_twist, moduli_dimension
from .construct import (BuildReport, ChainSquare, GradedTermList, build_appendix_a,
                        build_drezet_family, build_drezet_pairing, build_koszul_pair,
                        build_pairing_matrix, build_steiner_pairing, build_steiner_square,
                        extract_matrix, import_and_extract, predicted_mainthm)
from .field import DEFAULT_FIELD, GF, QQ, ConstMatrix, FieldSpec, nullspace_basis, rank, solve_exact
from .linform import HomogPoly, LinFormMatrix, ProjPoint, generic_rank, minor_poly
from .multilinear import ExtVector, contraction_matrix, maximal_rank_profile
from .verify import RankCertificate, verify_chain_commutes, verify_constant_rank

__version__ = "0.1.0"

__all__ = [
    "ChernPoly",
    "chern_of_complex_kernel",
    "chern_of_twist",
    "moduli_dimension",
    "BuildReport",
    "ChainSquare",
    "GradedTermList",
    "build_appendix_a",
    "build_drezet_family",
    "build_drezet_pairing",
    "build_koszul_pair",
    "build_pairing_matrix",
    "build_steiner_pairing",
    "build_steiner_square",
    "extract_matrix",
    "import_and_extract",
    "predicted_mainthm",
    "DEFAULT_FIELD",
    "GF",
    "QQ",
    "ConstMatrix",
    "FieldSpec",
    "nullspace_basis",
    "rank",
    "solve_exact",
    "HomogPoly",
    "LinFormMatrix",
    "ProjPoint",
    "generic_rank",
    "minor_poly",
    "ExtVector",
    "contraction_matrix",
    "maximal_rank_profile",
    "RankCertificate",
    "verify_chain_commutes",
    "verify_constant_rank",
]
