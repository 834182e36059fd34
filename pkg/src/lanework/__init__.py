"""lanework: load-balanced execution of sparse, irregular workloads.

Sparse inputs become atoms/tiles/tile sets, pluggable schedules partition
them across virtual lanes, and kernels (SpMV, SpMM, SSSP, BFS) consume the
balanced ranges.
"""

from ._backend import NUMBA_AVAILABLE, backend_name, numba_active, use_backend
from .executor import (
    SENTINEL_TILE,
    AtomicMinArray,
    CarryOut,
    CarryPolicy,
    ExecutorConfig,
    ImbalanceReport,
    atomic_min_real,
    execute_merge_path,
    execute_tile_major,
    fixup_combine,
    imbalance,
)
from .kernels import (
    UNREACHED,
    HeuristicConfig,
    SsspState,
    bfs,
    choose_spmv_schedule,
    spmm,
    spmv,
    spmv_auto,
    sssp,
    sssp_init,
    sssp_pass,
)
from .mmio import MatrixMarketError, load_matrix_market, parse_matrix_market, write_matrix_market
from .schedules import (
    GroupPlan,
    MergePathCoord,
    MergePathSlice,
    ScheduleKind,
    exclusive_prefix_sum,
    get_tile,
    group_plan,
    merge_path_partition,
    merge_path_search,
    merge_path_slices,
    thread_mapped_tiles,
)
from .sparse import (
    CooMatrix,
    CsrMatrix,
    Graph,
    coo_to_csr,
    csr_to_coo,
    generate_power_law_csr,
    generate_random_csr,
    transpose_csr,
    validate_coo,
    validate_csr,
)
from .work import TileSet, csr_tile_set, infinite_range, lane_stride_range, step_range

__version__ = "0.1.0"

__all__ = [
    "AtomicMinArray",
    "CarryOut",
    "CarryPolicy",
    "CooMatrix",
    "CsrMatrix",
    "ExecutorConfig",
    "Graph",
    "GroupPlan",
    "HeuristicConfig",
    "ImbalanceReport",
    "MatrixMarketError",
    "MergePathCoord",
    "MergePathSlice",
    "NUMBA_AVAILABLE",
    "SENTINEL_TILE",
    "ScheduleKind",
    "SsspState",
    "TileSet",
    "UNREACHED",
    "atomic_min_real",
    "backend_name",
    "bfs",
    "choose_spmv_schedule",
    "coo_to_csr",
    "csr_tile_set",
    "csr_to_coo",
    "exclusive_prefix_sum",
    "execute_merge_path",
    "execute_tile_major",
    "fixup_combine",
    "generate_power_law_csr",
    "generate_random_csr",
    "get_tile",
    "group_plan",
    "imbalance",
    "infinite_range",
    "lane_stride_range",
    "load_matrix_market",
    "merge_path_partition",
    "merge_path_search",
    "merge_path_slices",
    "numba_active",
    "parse_matrix_market",
    "spmm",
    "spmv",
    "spmv_auto",
    "sssp",
    "sssp_init",
    "sssp_pass",
    "step_range",
    "thread_mapped_tiles",
    "transpose_csr",
    "use_backend",
    "validate_coo",
    "validate_csr",
    "write_matrix_market",
]
