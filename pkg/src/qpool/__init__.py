"""Pooling designs from subset and subspace incidences over finite fields."""

from .combinatorics import (
    BoundBreakdown,
    bound_guo_wang_q,
    bound_macula,
    bound_ngo_du,
    bound_set_intersection,
    count_fixed_intersection,
    gaussian,
    max_s_bar,
    table1,
    test_to_item_ratio,
)
from .design import (
    DesignParams,
    IncidenceSource,
    PoolingMatrix,
    build_q_containment,
    build_q_intersection,
    build_set_containment,
    build_set_intersection,
    export,
    import_matrix,
)
from .disjunct import check_fully, falsify_sampled, measure_exhaustive, private_count
from .gf import field_make
from .simulate import decode, encode, inject_errors, simulate

__version__ = "0.1.0"
