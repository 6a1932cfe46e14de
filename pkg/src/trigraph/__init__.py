"""Random graphs with triangles: samplers, the triangle Gibbs measure, and
average-case reductions to and from Erdos-Renyi planted dense subgraph."""

__version__ = "0.1.0"

from .graph import (
    EdgeSet,
    Graph,
    TriangleSet,
    edge_index,
    edge_unindex,
    edge_union,
    is_uniformly_2star_dense,
    triangle_edges,
    triple_index,
    triple_unindex,
    wedge_set,
)
from .models import (
    ModelParams,
    PlantedSignal,
    gps_apply,
    plant_dense_subgraph,
    sample_er,
    sample_rgt,
    sample_rig,
)
from .gibbs import ChainState, GibbsSpec, conditional_marginal, glauber_sample, glauber_step, log_weight
from .reductions import (
    ReductionReport,
    estimate_pe,
    forward_transition,
    param_map_f,
    param_map_g,
    reverse_full,
    reverse_transition,
)
from .stats import er_vs_rgt_test, marginal_influence_exact, rgt_edge_density, signed_triangle_count
from .rng import make_rng
