"""Verification battery: anchors, internal identities, oracle fits, cross checks.

The battery separates two kinds of outcomes on purpose:

* internal identities (normalization sums, marginal sums, fit residuals)
  are hard requirements; any failure is fatal for the ``verify`` command;
* gaps between computed CHSH values and the published reference figures,
  and fitted-versus-closed-form coefficient verdicts, are informational.
  They are printed side by side and never asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import closed_form as cf
from .chsh import AngleQuad, s_value
from .closed_form import CorrelationModel
from .kinematics import BETA_ORACLE_MAX, Speed
from .oracle import (
    ConsistencyReport,
    CrossOracleReport,
    DEFAULT_COEFF_TOLERANCE,
    TEMPLATE_RESIDUAL_TOLERANCE,
    consistency_report,
    cross_check_unpolarized,
)

IDENTITY_TOLERANCE = 1e-12
SAMPLES_PER_MODEL = 200
SAMPLE_SEED = 20260811
FIT_BETAS = (0.3, 0.6, 0.9)


@dataclass(frozen=True)
class ReferencePoint:
    """A published CHSH value at a quoted speed and angle quadruple."""

    model: CorrelationModel
    beta: float
    angles_deg: tuple[float, float, float, float]
    s_reference: float


REFERENCE_POINTS = (
    ReferencePoint(CorrelationModel.POLARIZED, 0.9, (0.0, 45.0, 69.0, 200.0), -1.311),
    ReferencePoint(CorrelationModel.UNPOLARIZED, 0.8, (0.0, 45.0, 210.0, 15.0), -1.167),
)


def reference_for(model: CorrelationModel, beta: float, angles_deg) -> ReferencePoint | None:
    for point in REFERENCE_POINTS:
        if (
            point.model is model
            and abs(point.beta - beta) < 1e-12
            and all(abs(a - b) < 1e-9 for a, b in zip(point.angles_deg, angles_deg))
        ):
            return point
    return None


@dataclass(frozen=True)
class AnchorReport:
    model: CorrelationModel
    beta: float
    angles_deg: tuple[float, float, float, float]
    s_computed: float
    s_reference: float
    gap: float
    terms: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "beta": self.beta,
            "angles_deg": list(self.angles_deg),
            "s_computed": self.s_computed,
            "s_reference": self.s_reference,
            "gap": self.gap,
            "terms": list(self.terms),
        }


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error < self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    anchors: list[AnchorReport] = field(default_factory=list)
    identities: list[IdentityCheck] = field(default_factory=list)
    consistency: list[ConsistencyReport] = field(default_factory=list)
    cross_oracle: list[CrossOracleReport] = field(default_factory=list)

    @property
    def identities_pass(self) -> bool:
        return all(check.passed for check in self.identities)

    @property
    def cross_oracle_agree(self) -> bool:
        return all(report.agree for report in self.cross_oracle)

    def to_dict(self) -> dict:
        return {
            "anchors": [a.to_dict() for a in self.anchors],
            "identities": [c.to_dict() for c in self.identities],
            "consistency": [r.to_dict() for r in self.consistency],
            "cross_oracle": [r.to_dict() for r in self.cross_oracle],
            "identities_pass": self.identities_pass,
            "cross_oracle_agree": self.cross_oracle_agree,
        }


def anchor_reports() -> list[AnchorReport]:
    """Evaluate both published reference points from the closed forms."""
    reports = []
    for point in REFERENCE_POINTS:
        result = s_value(
            point.model, Speed(point.beta), AngleQuad.from_degrees(*point.angles_deg)
        )
        reports.append(
            AnchorReport(
                model=point.model,
                beta=point.beta,
                angles_deg=point.angles_deg,
                s_computed=result.s_value,
                s_reference=point.s_reference,
                gap=abs(result.s_value - point.s_reference),
                terms=result.terms,
            )
        )
    return reports


def _sample_triples(count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    cols = rng.uniform(size=(count, 3))
    cols[:, 1:] *= 2.0 * math.pi  # beta stays in [0, 1); angles span [0, 2 pi)
    return cols


def identity_checks(
    samples: int = SAMPLES_PER_MODEL,
    seed: int = SAMPLE_SEED,
    tolerance: float = IDENTITY_TOLERANCE,
) -> list[IdentityCheck]:
    """Normalization and marginal identities over a deterministic sample set."""
    triples = _sample_triples(samples, seed)
    errors = {
        "polarized four-pair sum equals 1": 0.0,
        "unpolarized four-pair sum equals 1": 0.0,
        "polarized normalization equals brute four-pair sum": 0.0,
        "unpolarized normalization equals brute four-pair sum": 0.0,
        "polarized marginal 1 equals defining sum": 0.0,
        "polarized marginal 2 equals defining sum": 0.0,
        "unpolarized marginals equal one half": 0.0,
    }
    for beta, chi1, chi2 in triples:
        speed = Speed(beta)
        pol = cf.four_pair_sum(lambda a, b: cf.joint(CorrelationModel.POLARIZED, speed, a, b), chi1, chi2)
        unp = cf.four_pair_sum(lambda a, b: cf.joint(CorrelationModel.UNPOLARIZED, speed, a, b), chi1, chi2)
        errors["polarized four-pair sum equals 1"] = max(
            errors["polarized four-pair sum equals 1"], abs(pol - 1.0)
        )
        errors["unpolarized four-pair sum equals 1"] = max(
            errors["unpolarized four-pair sum equals 1"], abs(unp - 1.0)
        )
        errors["polarized normalization equals brute four-pair sum"] = max(
            errors["polarized normalization equals brute four-pair sum"],
            abs(cf.four_pair_sum(lambda a, b: cf.f_polarized(speed, a, b), chi1, chi2) - cf.n_polarized(speed)),
        )
        errors["unpolarized normalization equals brute four-pair sum"] = max(
            errors["unpolarized normalization equals brute four-pair sum"],
            abs(cf.four_pair_sum(lambda a, b: cf.f_unpolarized(speed, a, b), chi1, chi2) - cf.norm_unpolarized(speed)),
        )
        joint_pol = lambda a, b: cf.joint(CorrelationModel.POLARIZED, speed, a, b)
        errors["polarized marginal 1 equals defining sum"] = max(
            errors["polarized marginal 1 equals defining sum"],
            abs(joint_pol(chi1, chi2) + joint_pol(chi1, chi2 + math.pi) - cf.marginal1_polarized(speed, chi1)),
        )
        errors["polarized marginal 2 equals defining sum"] = max(
            errors["polarized marginal 2 equals defining sum"],
            abs(joint_pol(chi1, chi2) + joint_pol(chi1 + math.pi, chi2) - cf.marginal2_polarized(speed, chi2)),
        )
        joint_unp = lambda a, b: cf.joint(CorrelationModel.UNPOLARIZED, speed, a, b)
        errors["unpolarized marginals equal one half"] = max(
            errors["unpolarized marginals equal one half"],
            abs(joint_unp(chi1, chi2) + joint_unp(chi1, chi2 + math.pi) - 0.5),
            abs(joint_unp(chi1, chi2) + joint_unp(chi1 + math.pi, chi2) - 0.5),
            abs(cf.marginal_unpolarized(1) - 0.5),
            abs(cf.marginal_unpolarized(2) - 0.5),
        )
    return [IdentityCheck(name, float(err), tolerance) for name, err in errors.items()]


def fit_checks(
    betas=FIT_BETAS,
    coeff_tolerance: float = DEFAULT_COEFF_TOLERANCE,
    residual_tolerance: float = TEMPLATE_RESIDUAL_TOLERANCE,
) -> tuple[list[IdentityCheck], list[ConsistencyReport]]:
    """Template fits per model and speed; residuals gate, coefficients inform."""
    checks: list[IdentityCheck] = []
    reports: list[ConsistencyReport] = []
    for beta in betas:
        speed = Speed(min(beta, BETA_ORACLE_MAX))
        for model in (CorrelationModel.POLARIZED, CorrelationModel.UNPOLARIZED):
            report = consistency_report(model, speed, tolerance=coeff_tolerance)
            reports.append(report)
            checks.append(
                IdentityCheck(
                    name=f"{model.value} template fit residual at beta={speed.beta:g}",
                    max_error=report.residual,
                    tolerance=residual_tolerance,
                )
            )
    return checks, reports


def cross_checks(betas=FIT_BETAS) -> list[CrossOracleReport]:
    return [cross_check_unpolarized(Speed(min(b, BETA_ORACLE_MAX))) for b in betas]


def run_verification(
    fit_betas=FIT_BETAS,
    coeff_tolerance: float = DEFAULT_COEFF_TOLERANCE,
) -> VerificationReport:
    """Full battery: anchors, identities, fits, cross checks."""
    report = VerificationReport()
    report.anchors = anchor_reports()
    report.identities = identity_checks()
    residual_checks, fit_reports = fit_checks(fit_betas, coeff_tolerance)
    report.identities.extend(residual_checks)
    report.consistency = fit_reports
    report.cross_oracle = cross_checks(fit_betas)
    return report
