"""Scalar-on-multiple-function regression with classical and robust
partial least squares, a principal-component baseline, trimmed
evaluation metrics, and a Monte Carlo harness."""

from .basis import (BasisSystem, MultiFunctionalDesign, build_bspline_system,
                    build_design, evaluate_basis, gram_from_function,
                    gram_matrix, inv_sqrt_gram, smooth_curves, sqrt_gram)
from .errors import (BreakdownError, ConfigError, DegenerateScaleError,
                     EfficiencyUndefinedError, InputError, NumericalError,
                     RfplsError)
from .evaluation import (CVReport, iqr_outliers, risee, select_num_components,
                         trimmed_mspe, trimmed_r2)
from .fileio import (CurveTable, load_model, read_curves, read_response,
                     save_model, write_curves, write_predictions,
                     write_response)
from .regression import (FittedSofr, RobustReport, coefficient_functions,
                         fit_fpc, fit_fpls, fit_rfpls, predict,
                         predict_from_design)
from .robust import (DEFAULT_HAMPEL, HampelConstants, MEstimate,
                     bisquare_weight, efficiency_factor, hampel_f,
                     hampel_weight, l1_median, m_estimate, mad_scale,
                     select_tuning, tukey_kappa, tukey_rho)
from .robust_pls import RobustPLSFit, initial_weights, prm_fit
from .simpls import PLSFit, pls_predict, simpls_fit, weighted_simpls_fit
from .simulation import (ExperimentConfig, ExperimentResult, SimDataset,
                         contaminate, generate_clean, run_experiment)

__version__ = "0.1.0"

__all__ = [
    "BasisSystem", "MultiFunctionalDesign", "build_bspline_system",
    "build_design", "evaluate_basis", "gram_from_function", "gram_matrix",
    "inv_sqrt_gram", "smooth_curves", "sqrt_gram",
    "BreakdownError", "ConfigError", "DegenerateScaleError",
    "EfficiencyUndefinedError", "InputError", "NumericalError", "RfplsError",
    "CVReport", "iqr_outliers", "risee", "select_num_components",
    "trimmed_mspe", "trimmed_r2",
    "CurveTable", "load_model", "read_curves", "read_response", "save_model",
    "write_curves", "write_predictions", "write_response",
    "FittedSofr", "RobustReport", "coefficient_functions", "fit_fpc",
    "fit_fpls", "fit_rfpls", "predict", "predict_from_design",
    "DEFAULT_HAMPEL", "HampelConstants", "MEstimate", "bisquare_weight",
    "efficiency_factor", "hampel_f", "hampel_weight", "l1_median",
    "m_estimate", "mad_scale", "select_tuning", "tukey_kappa", "tukey_rho",
    "RobustPLSFit", "initial_weights", "prm_fit",
    "PLSFit", "pls_predict", "simpls_fit", "weighted_simpls_fit",
    "ExperimentConfig", "ExperimentResult", "SimDataset", "contaminate",
    "generate_clean", "run_experiment",
]
