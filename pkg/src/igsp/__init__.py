"""Permutation-based causal structure learning from observational and
interventional Gaussian data."""

__version__ = "0.1.0"

from .algorithms import (
    LocalScore,
    ScoreConfig,
    SearchConfig,
    SearchResult,
    algorithm1,
    count_i_contradicting,
    i_covered_arrows,
    igsp,
    index_sets,
    interventional_bic,
    is_i_contradicting,
    is_i_covered,
    node_score,
    score_diff_covered_reversal,
)
from .citest import (
    CiOracle,
    DataOracle,
    DSepOracle,
    RegimeData,
    data_oracle,
    dsep_oracle,
    fisher_z_statistic,
    gaussian_ci_test,
    partial_correlation,
)
from .errors import (
    CycleError,
    DatasetError,
    InsufficientSamplesError,
    InvalidArgumentError,
    InvalidMoveError,
    NumericalDegeneracyError,
)
from .evaluation import (
    ScenarioConfig,
    StructuralCounts,
    SweepRow,
    consistency_sweep,
    imec_recovered,
    structural_metrics,
)
from .graph import (
    Dag,
    InterventionFamily,
    Pdag,
    covered_arrows,
    cpdag,
    d_separated,
    i_essential_graph,
    i_markov_equivalence_class,
    i_markov_equivalent,
    immoralities,
    interventional_dag,
    markov_equivalence_class,
    markov_equivalent,
    skeleton,
)
from .imap import conditioning_set, linear_extension, minimal_imap, reverse_covered
from .io import load_dataset
from .rng import DEFAULT_SEED, derive_rng
from .sem import SemModel, random_dag, random_targets, random_weights, sample
