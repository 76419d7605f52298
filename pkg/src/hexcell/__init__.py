"""Machine checks for triply-shortened extended Hamming codes and the
six-cell equitable partitions and families built from them."""

__version__ = "0.1.0"

from .cells import (CellSystem, build_c_system, build_d_family, build_shortened_partition,
                    code_partition, correspondence_check, read_cells, write_cells)
from .codes import (Code, ParamClass, extend_parity, extended_hamming, hamming, random_lambda,
                    read_code, shorten, validate, vasilev, write_code)
from .equitable import (ExplicitGraph, QuotientMatrix, check_equitable, check_pattern_table,
                        check_triple_count, golden_matrix, infer_quotient, triple_count_criterion)
from .errors import (ConditionViolation, ExpansionError, StructuralError, UsageError,
                     ValidationError, Verdict)
from .hypercube import Word
from .regularity import (build_centered_embedding, check_completely_regular,
                         check_distance_invariant, check_semiregular, oa_strength,
                         verify_1_centered)
from .spectra import (distance_distribution, expand_distance_distribution, predict_sphere_sums,
                      weight_distribution)

__all__ = [
    "CellSystem", "Code", "ConditionViolation", "ExpansionError", "ExplicitGraph", "ParamClass",
    "QuotientMatrix", "StructuralError", "UsageError", "ValidationError", "Verdict", "Word",
    "build_c_system", "build_centered_embedding", "build_d_family", "build_shortened_partition",
    "check_completely_regular", "check_distance_invariant", "check_equitable",
    "check_pattern_table", "check_semiregular", "check_triple_count", "code_partition",
    "correspondence_check", "distance_distribution", "expand_distance_distribution",
    "extend_parity", "extended_hamming", "golden_matrix", "hamming", "infer_quotient",
    "oa_strength", "predict_sphere_sums", "random_lambda", "read_cells", "read_code", "shorten",
    "triple_count_criterion", "validate", "vasilev", "verify_1_centered", "weight_distribution",
    "write_cells", "write_code",
]
