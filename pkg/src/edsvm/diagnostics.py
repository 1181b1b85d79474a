"""Estimable benchmark-quality and radius diagnostics."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .baselines import TrainedModel, extract_slacks
from .elite import EliteGuide
from .models import rkhs_norm

USEFUL = "benchmark likely useful, consider small omega"
KEEP = "keep omega near 1"


def benchmark_quality(reference: TrainedModel, guide: EliteGuide) -> float:
    """Mean over the elite set of (xi_i(reference) - xi_i*)^2."""
    if guide.m == 0:
        raise ValueError("benchmark quality needs a nonempty elite set")
    guide.check(reference.n)
    dev = extract_slacks(reference)[guide.elite] - guide.targets
    return float(np.mean(dev * dev))


def rkhs_norm_sq(model: TrainedModel) -> float:
    """(alpha*y)' K (alpha*y) over the training points, intercept excluded."""
    return rkhs_norm(model)


def hinge_risk(model: TrainedModel) -> float:
    return float(np.mean(extract_slacks(model)))


def ls_risk(model: TrainedModel) -> float:
    return float(np.mean(extract_slacks(model) ** 2))


def usefulness_ratio(m: int, e_star: float, n: int, risk: float) -> float:
    """m E* / (n R); +inf for a zero risk with E* > 0 and 0 when both vanish."""
    num = m * e_star
    den = n * risk
    if den == 0.0:
        return np.inf if num > 0 else 0.0
    return num / den


def recommendation(ratio: float) -> str:
    return USEFUL if ratio < 1.0 else KEEP


@dataclass(frozen=True)
class DiagnosticsReport:
    variant: str
    C: float
    omega: float
    n: int
    m: int
    norm_sq_ref: float
    norm_sq_ref_ls: float
    e_m_star: float
    e_m_star_ls: float
    hinge_risk_ref: float
    ls_risk_ref: float
    lambda_n_sq: float
    lambda_svm_sq: float
    gamma_ls: float
    gamma_ls_svm: float
    ratio: float
    ratio_ls: float
    recommendation: str
    comparator: str = "empirical comparator"

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, float) and not np.isfinite(v):
                d[k] = "inf" if v > 0 else "-inf"
        return d


def radii_report(reference: TrainedModel, guide: EliteGuide, C: float, omega: float,
                 variant: str = "CEDSVM", reference_ls: TrainedModel | None = None
                 ) -> DiagnosticsReport:
    """Radii for EDSVM and the plain SVM built from an empirical comparator fit.

    ``reference`` stands in for the hinge-risk minimiser and ``reference_ls`` (default:
    the same fit) for the squared-hinge one. The recommendation follows the ratio of
    the variant being tuned.
    """
    if variant not in ("CEDSVM", "LSEDSVM"):
        raise ValueError(f"unknown variant {variant!r}")
    if not C > 0 or not 0.0 < omega <= 1.0:
        raise ValueError("need C > 0 and omega in (0, 1]")
    ref_ls = reference if reference_ls is None else reference_ls
    n, m = reference.n, guide.m
    e = benchmark_quality(reference, guide) if m else 0.0
    e_ls = benchmark_quality(ref_ls, guide) if m else 0.0
    r = hinge_risk(reference)
    r_ls = ls_risk(ref_ls)
    k = rkhs_norm_sq(reference)
    k_ls = k if ref_ls is reference else rkhs_norm_sq(ref_ls)
    lam = k + 2 * C * n * omega * r + 2 * C * m * (1 - omega) * e
    lam_svm = k + 2 * C * n * r
    gam = k_ls + 2 * C * n * omega * r_ls + 2 * C * m * (1 - omega) * e_ls
    gam_svm = k_ls + 2 * C * n * r_ls
    ratio = usefulness_ratio(m, e, n, r)
    ratio_ls = usefulness_ratio(m, e_ls, n, r_ls)
    rec = recommendation(ratio if variant == "CEDSVM" else ratio_ls)
    return DiagnosticsReport(variant, float(C), float(omega), n, m, k, k_ls, e, e_ls, r, r_ls,
                             lam, lam_svm, gam, gam_svm, ratio, ratio_ls, rec)
