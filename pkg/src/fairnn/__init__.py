"""Uniform and almost-uniform sampling from unions of sets, with LSH and
filter indexes for fair near-neighbor queries."""

from .errors import (BuildError, EstimationError, FairnnError, MergeError,
                     ReplicaExhaustionError, RoundCapError, SamplingError,
                     SegmentOverflowError)
from .set_family import (ElementSet, GroundSet, RankedFamily, SubFamilyQuery,
                         build_family)
from .sketches import (DistinctSketch, WeightedTree, estimate_subset_fraction,
                       merge_estimate)
from .union_sampling import (SampleOutcome, SamplerKind, SampleStatus,
                             sample_approx_degree, sample_approx_outliers,
                             sample_dependent, sample_dependent_outliers,
                             sample_dependent_perturb, sample_exact_degree,
                             sample_perturb_outliers, sample_rank_segment,
                             sample_segment_outliers,
                             sample_segment_outliers_multi, sample_simulation,
                             accept_bit_scale, urn_accept_bit, urn_accept_bits,
                             urn_probe_expectation, urn_probe_values)
from .lsh import (EuclideanGrid, LshIndex, MinHash1Bit, build_lsh,
                  collision_probability, standard_ann_query)
from .fair_nn import (FairAnswer, default_outlier_budget,
                      fair_ann_approx, fair_nn_approx,
                      fair_nn_dependent, fair_nn_independent,
                      fair_nn_independent_whp)
from .lsf import (LsfIndex, LsfParams, build_lsf, filter_slack, lsf_ann_query,
                  lsf_fair_query, query_exponent, tensor_parts)

__version__ = "0.1.0"
