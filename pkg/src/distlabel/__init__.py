"""Distance-constrained labellings of Cartesian products of graphs.

Builds optimal cyclic/no-hole L(h,1,...,1) labellings of graph products with
an inductive offset-set construction, computes the labelling invariants
exactly on small graphs, and certifies the resulting equalities.
"""

from .graphs import (
    INF,
    Graph,
    ProductGraph,
    bounded_distances,
    cartesian_product,
    complete_graph,
    cycle_graph,
    diameter,
    graph_from_edges,
    graph_power,
    hamming_graph,
    hypercube,
    induced_subgraph,
    path_graph,
    product_distance,
    star_graph,
)
from .labelling import (
    HVector,
    Labelling,
    VerificationReport,
    colouring_from_labelling,
    cyclic_distance,
    no_hole_cyclic,
    no_hole_linear,
    restrict,
    span,
    verify_cyclic,
    verify_linear,
)
from .construction import (
    ConstructionStuck,
    construct_labelling,
    radix_spec,
)
from .solver import (
    SolveResult,
    UnresolvedError,
    certificate_check,
    chromatic_exact,
    lambda_exact,
    nlambda_exact,
    nsigma_exact,
    sigma_exact,
)
from .lab import (
    InstanceSpec,
    non_hamming_instance,
    run_sandwich_experiment,
    run_theorem_experiment,
)

__version__ = "0.1.0"
