"""Datasets, experiments, persistence, and the command-line interface."""

from .data import (Dataset, emit, ingest, knn_distance, select_queries,
                   synthetic_set_dataset, synthetic_unit_dataset,
                   synthetic_vector_dataset)
from .experiments import (Algorithm, DATASET_PROFILES, DEFAULT_ALGORITHMS,
                          ExperimentConfig, FairnessReport,
                          case_study_instance, profile_config, run_case_study,
                          run_fairness_experiment, run_ratio_study, run_timing,
                          total_variation)
from .storage import load_index, read_params, save_index
