"""Constrained-degree percolation: seeded simulation on boxes and trees,
connectivity estimators, and exact combinatorial verification."""

__version__ = "0.1.0"

from .clusters import (BoundaryCountSeries, ClusterForest, ConnectionTime,
                       boundary_counts, components, connection_time,
                       count_crossing_clusters, crossing,
                       dual_blocking_crossing)
from .contours import (AnomalyInjectionError, BudgetError, Contour,
                       ContourClassification, anomaly_injection,
                       census_counts, classify_contour, enumerate_contours,
                       injection_domain, path_count_bound, verify_census)
from .dynamics import (BLOCKED, ClockAssignment, Configuration,
                       DiminishmentLayout, OpeningSchedule, config_at,
                       diminishment_layout, run_constrained, run_diminished,
                       run_unrestricted, sample_clocks)
from .estimators import (CurveEstimate, ExperimentConfig, ProportionEstimate,
                         TcEstimate, estimate_crossing, estimate_tc,
                         estimate_theta, k2_decay_experiment, tree_red_density,
                         tree_survival, uniqueness_experiment)
from .exact import (CORNER_CASES, ArgmaxCheck, PeierlsParams,
                    corner_blocker_probability, ordering_event_probability,
                    peierls_eval, series_term_argmax)
from .lattice import (ConstraintSpec, DualEdgeMap, LatticeSpec, SizingError,
                      build_box_lattice, build_rectangle, build_tree, dual_map)
from .trees import (RedEdgeAnalysis, binary_forest_mask, forest_membership,
                    red_edge_analysis, red_edge_conditionals,
                    red_edge_probability, red_edge_probability_oracle)
