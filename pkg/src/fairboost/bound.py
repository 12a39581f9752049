"""Training-objective losses and the product-of-normalizers upper bound.

For an ensemble trained with trade-off weight lam, the signed objective

    error_rate + lam * (unfavored rate - favored rate)

never exceeds prod_t Z_t on the training set as long as lam stayed within
its admissible range: the signed objective is a non-negatively weighted sum
of 0/1 losses, each bounded by its exponential counterpart, and the
exponentially weighted sum telescopes to the Z product.  The absolute-value
objective coincides with the signed one exactly when the favored group is
doing at least as well as the unfavored one; the report exposes that
ordering instead of assuming it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boost import Ensemble, TrainingTrace
from .dataset import Dataset
from .errors import ContractError
from .metrics import signed_gap
from .preprocess import FairnessIndicator

BOUND_ATOL = 1e-9
BOUND_RTOL = 1e-6


@dataclass(frozen=True)
class BoundReport:
    """Outcome of auditing one trained ensemble on its training set."""

    objective_abs: float
    objective_signed: float
    z_product: float
    holds_signed: bool
    assumption_satisfied: bool


def objective_loss(
    ens: Ensemble,
    ds: Dataset,
    indicator: FairnessIndicator | None = None,
    lam: float | None = None,
    form: str = "absolute",
) -> float:
    """Error rate plus ``lam`` times the (absolute or signed) fairness gap.

    Defaults to the ensemble's own indicator and effective trade-off weight.
    """
    if form not in ("absolute", "signed"):
        raise ContractError(f"form must be 'absolute' or 'signed', got {form!r}")
    if indicator is None:
        indicator = ens.indicator
    if lam is None:
        lam = ens.lam_effective
    pred = ens.predict_batch(ds.X)
    error_rate = float((pred != ds.y).mean())
    gap = signed_gap(pred, ds, indicator)
    if form == "signed":
        return error_rate + lam * gap
    return error_rate + lam * abs(gap)


def z_product(trace: TrainingTrace) -> float:
    """Product of the per-round normalization factors."""
    if not trace.z:
        raise ContractError("trace has no recorded rounds")
    return float(math.prod(trace.z))


def verify_bound(ens: Ensemble, train: Dataset) -> BoundReport:
    """Audit the upper bound on the training set the ensemble was fit to.

    ``holds_signed`` certifies objective_signed <= prod Z_t up to a small
    absolute plus relative tolerance.  When ``assumption_satisfied`` (the
    favored group's rate is no worse), the absolute-form objective equals
    the signed one, so the bound covers it too.
    """
    if not ens.trace.z:
        raise ContractError("ensemble carries no training trace")
    pred = ens.predict_batch(train.X)
    error_rate = float((pred != train.y).mean())
    gap = signed_gap(pred, train, ens.indicator)
    lam = ens.lam_effective
    obj_signed = error_rate + lam * gap
    obj_abs = error_rate + lam * abs(gap)
    zp = z_product(ens.trace)
    return BoundReport(
        objective_abs=obj_abs,
        objective_signed=obj_signed,
        z_product=zp,
        holds_signed=obj_signed <= zp + BOUND_ATOL + BOUND_RTOL * zp,
        assumption_satisfied=gap >= 0.0,
    )


def bound_report_to_dict(report: BoundReport) -> dict:
    return {
        "objective_abs": report.objective_abs,
        "objective_signed": report.objective_signed,
        "z_product": report.z_product,
        "holds_signed": report.holds_signed,
        "assumption_satisfied": report.assumption_satisfied,
    }
