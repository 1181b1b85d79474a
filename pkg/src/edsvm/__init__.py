"""Elite-driven support vector machines and their baselines."""
from .baselines import (TrainedModel, extract_slacks, fit_csvm, fit_linexsvm, fit_lssvm,
                        margin_deviations, support_indices)
from .calibration import CalibrationReport, check_calibration, induced_loss_cedsvm, induced_loss_lsedsvm
from .diagnostics import DiagnosticsReport, benchmark_quality, radii_report, rkhs_norm_sq
from .elite import AggregationRule, EliteGuide, aggregate_targets, build_elite_set, make_guide
from .evaluation import (ExperimentConfig, GridSpec, Metrics, compute_metrics, grid_search,
                         roc_auc, run_experiment, stratified_kfold)
from .kernels import DataError, Dataset, KernelSpec, Standardizer, compute_gram, decision_values
from .models import (EDSVMConfig, build_cedsvm_dual, build_lsedsvm_dual, duality_gap, fit_edsvm,
                     predict, primal_objective)
from .qp import DualQP, QPSolution, SolverError, kkt_report, solve_reference, solve_smo
from .simulation import MixtureSpec, bayes_accuracy, draw_centers, run_simulation, sample_dataset

__version__ = "0.1.0"

__all__ = [
    "TrainedModel", "extract_slacks", "fit_csvm", "fit_linexsvm", "fit_lssvm", "margin_deviations",
    "support_indices", "CalibrationReport", "check_calibration", "induced_loss_cedsvm",
    "induced_loss_lsedsvm", "DiagnosticsReport", "benchmark_quality", "radii_report",
    "rkhs_norm_sq", "AggregationRule", "EliteGuide", "aggregate_targets", "build_elite_set",
    "make_guide", "ExperimentConfig", "GridSpec", "Metrics", "compute_metrics", "grid_search",
    "roc_auc", "run_experiment", "stratified_kfold", "DataError", "Dataset", "KernelSpec",
    "Standardizer", "compute_gram", "decision_values", "EDSVMConfig", "build_cedsvm_dual",
    "build_lsedsvm_dual", "duality_gap", "fit_edsvm", "predict", "primal_objective", "DualQP",
    "QPSolution", "SolverError", "kkt_report", "solve_reference", "solve_smo", "MixtureSpec",
    "bayes_accuracy", "draw_centers", "run_simulation", "sample_dataset", "__version__",
]
