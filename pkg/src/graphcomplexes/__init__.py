"""Finite graded slices of directed, undirected and weighted graph complexes.

Exact-arithmetic bases, differentials with constructive orientation signs,
chain maps, sparse integer linear algebra, and cohomology dimension reports
with machine-checked structural identities (d^2 = 0, chain maps, cocycle
certificates) at desk scale.
"""

from .graphs import (
    EnumConstraints,
    Graph,
    GraphError,
    OrientedClass,
    SliceTooLarge,
    canonical_key,
    canonicalize,
    degree,
    enumerate_classes,
    loop_order,
    parse_key,
    skeleton,
    string_decomposition,
)
from .complexes import (
    Basis,
    ComplexError,
    GradedSlice,
    StringClass,
    basis,
    classify_summand,
    disconnected_dims,
    get_complex,
)
from .differentials import (
    ChainVector,
    SubcomplexViolation,
    bracket,
    d_aux,
    differential,
    edge_vector,
    loop_action,
    map_F_wheeled,
    map_i_directed,
    project_equal,
    reconciling_sign,
    rescaling_class,
    vector_of,
)
from .linalg import (
    ImageResult,
    RankResult,
    SparseIntMatrix,
    assemble,
    in_image,
    rank,
    random_primes,
    read_matrix_market,
    write_matrix_market,
)
from .homology import (
    CheckResult,
    CohomologyReport,
    cohomology,
    cone_report,
    is_nontrivial_cocycle,
    ses_consistency,
    verify_chain_map,
    verify_d_squared,
)

__version__ = "0.1.0"
