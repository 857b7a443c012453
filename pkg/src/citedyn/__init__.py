"""citedyn: stochastic simulation and analysis of citation-network growth.

The model couples a direct channel (papers found independently, at a rate
set by a per-paper fitness) with a copying channel (papers found in the
reference lists of already-citing papers), giving a self-exciting Poisson
process whose kernel strengthens logarithmically with accumulated
citations.  The same machinery is exposed from the reference-list side,
through the reference-citation duality, and in a deterministic continuum
approximation with closed-form lifetime and runaway thresholds.
"""

from .curves import EmpiricalCurves, default_curves, extend_F, load_curves, save_curves
from .duality import MeanCitationCurve, mean_field_M, r_to_M, tail_convergence_report
from .kernels import kernel_value, p0_of_K, p0_of_s, sample_fitness
from .params import ModelParams, load_params, save_params
from .refmodel import (ReferenceProfile, compute_indirect_absolute,
                       compute_indirect_reduced, convolution_form_check,
                       fit_exponential_kernel)
from .simulate import (EnsembleResult, EnsembleSummary, PaperTrajectory, ar2_rate,
                       backend, latent_rate, poisson_step, simulate_ensemble,
                       simulate_paper)
from .continuum import (ContinuumResult, closed_form_rate, cumulative_approx,
                        eta_critical, lifetime_tau0, runaway_crossing)
from .metrics import (BinnedRateStats, MotifStats, citation_distribution,
                      clustering_from_motifs, fano_and_pa_fit,
                      pearson_autocorrelation, toy_s_of_K, uncited_fraction,
                      validation_report)

__version__ = "0.1.0"

__all__ = [
    "EmpiricalCurves", "default_curves", "extend_F", "load_curves", "save_curves",
    "MeanCitationCurve", "mean_field_M", "r_to_M", "tail_convergence_report",
    "kernel_value", "p0_of_K", "p0_of_s", "sample_fitness",
    "ModelParams", "load_params", "save_params",
    "ReferenceProfile", "compute_indirect_absolute", "compute_indirect_reduced",
    "convolution_form_check", "fit_exponential_kernel",
    "EnsembleResult", "EnsembleSummary", "PaperTrajectory", "ar2_rate", "backend",
    "latent_rate", "poisson_step", "simulate_ensemble", "simulate_paper",
    "ContinuumResult", "closed_form_rate", "cumulative_approx", "eta_critical",
    "lifetime_tau0", "runaway_crossing",
    "BinnedRateStats", "MotifStats", "citation_distribution", "clustering_from_motifs",
    "fano_and_pa_fit", "pearson_autocorrelation", "toy_s_of_K", "uncited_fraction",
    "validation_report",
    "__version__",
]
