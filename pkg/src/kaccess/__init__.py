"""k-accessibility percolation on rooted trees: exact checks, auxiliary graphs and Monte Carlo."""

from kaccess.accessibility import (
    AccessOutcome,
    Verdict,
    Witness,
    check_path,
    is_k_accessible,
    lazy_is_k_accessible,
    path_witness,
    validate_witness,
)
from kaccess.closure import (
    HkTree,
    MonotoneDag,
    build_Hk,
    build_hk_from_tree,
    count_skip_sets,
    enumerate_skip_sets,
    is_1_accessible_dag,
    k_transitive_closure,
    level_subsample,
)
from kaccess.estimate import (
    ExactTheta,
    ThetaEstimate,
    exact_theta,
    exact_theta_dag,
    monte_carlo_theta,
    wilson_interval,
)
from kaccess.tree import (
    Labeling,
    LazyLabeler,
    RootedTree,
    build_nary_tree,
    derive_seed,
    parse_labeled_tree,
    parse_tree,
    sample_labeling,
)

__version__ = "0.1.0"
