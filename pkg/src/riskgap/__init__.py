"""Risk-gap engine: stated risk profiles versus revealed portfolio risk.

The package scores client allocations over five ordered risk buckets with a
parametric value-at-risk model, compares the stated profile against the
portfolio actually held, and aggregates the resulting risk gaps across a
book of business.  A CLI and an HTTP service wrap the same library code.
"""

from .allocation import BUCKET_LABELS, BUCKET_NAMES, N_BUCKETS, RiskAllocation
from .analytics import (BootstrapCI, EventRecord, EventStudy, Histogram1D,
                        Histogram2D, QuantilePoint, QuantileSeries, RiskFrame,
                        SeriesPoint, StatSeries, WeightedSummary,
                        bootstrap_group_means, bootstrap_mean_ci,
                        cash_influx_study, client_summary, group_timeseries,
                        histogram, histogram2d, kyc_change_study,
                        quantile_linear, score_dataset, summarize_rows,
                        under_risked_share)
from .dataset import (ACCOUNT_TYPES, ADVISORY_TYPES, AccountSnapshot,
                      ClientRecord, DatasetManifest, format_allocation,
                      load_clients_file, load_snapshots_file, parse_clients,
                      parse_snapshots, write_clients, write_snapshots)
from .errors import (AllocationError, DatasetError, MetricError, ModelError,
                     RiskGapError, SynthesisError)
from .market import (DEFAULT_ALPHA, BucketMarketModel, build_covariance,
                     load_default_model, load_model_file, parse_model)
from .metrics import (METRIC_IDS, PENALTY_KINDS, CandidateScore,
                      PathologyFlag, PathologyReport, PenaltyMatrix,
                      euclidean_distance, kl_divergence, make_penalty,
                      metric_value, pathology_report, quadratic_discrepancy)
from .synth import (DEFAULT_CATALOGUE, SyntheticSpec, calibrated_cohort_spec,
                    generate_synthetic, shift_allocation)
from .var_engine import (VaRDiscrepancy, VaRQuote, classify_discrepancy,
                         format_quote, normal_quantile, round_cents,
                         round_half_away, solve_allocation_for_var, var,
                         var_discrepancy, var_dollars, var_many)

__version__ = "0.1.0"
