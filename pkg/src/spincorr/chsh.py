"""CHSH quantity S and deterministic violation search over detector angles.

S combines four joint and two single-spin probabilities,

    S = P[x1, x2] - P[x1, x2'] + P[x1', x2] + P[x1', x2']
        - P[x1', -] - P[-, x2],

all read from the closed-form module for the chosen model.  Local
hidden-variable theories confine S to [-1, 0]; any value outside that
interval counts as a violation, in either direction.

The search minimizes S: an exhaustive coarse grid (made cheap by splitting
the six terms into two parts that share only the primed/unprimed first
angles) followed by Nelder-Mead refinement from the best cell.  Everything
is deterministic; repeated runs give bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .closed_form import CorrelationModel, joint, marginal
from .kinematics import Speed

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AngleQuad:
    """Measurement angles (radians): unprimed and primed pair per particle."""

    chi1: float
    chi2: float
    chi1p: float
    chi2p: float

    def __post_init__(self) -> None:
        for name in ("chi1", "chi2", "chi1p", "chi2p"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"angle {name} = {value!r} is not finite")
            object.__setattr__(self, name, value)

    @classmethod
    def from_degrees(cls, chi1: float, chi2: float, chi1p: float, chi2p: float) -> "AngleQuad":
        return cls(*(math.radians(a) for a in (chi1, chi2, chi1p, chi2p)))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.chi1, self.chi2, self.chi1p, self.chi2p)

    def degrees(self) -> tuple[float, float, float, float]:
        return tuple(math.degrees(a) for a in self.as_tuple())

    def degrees_mod_360(self) -> tuple[float, float, float, float]:
        return tuple(math.degrees(a) % 360.0 for a in self.as_tuple())


@dataclass(frozen=True)
class SearchSettings:
    """Deterministic search profile.

    The coarse step must divide 360 degrees.  Refinement runs a simplex
    from the best grid cell until the S improvement drops below
    ``s_tolerance`` or ``max_iterations`` is hit.
    """

    grid_step_deg: float = 5.0
    max_iterations: int = 500
    s_tolerance: float = 1e-10

    def __post_init__(self) -> None:
        step = float(self.grid_step_deg)
        if not (math.isfinite(step) and 0.0 < step <= 360.0):
            raise ValueError(f"grid step must be in (0, 360], got {self.grid_step_deg!r}")
        ratio = 360.0 / step
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(f"grid step {step!r} does not divide 360 degrees")
        object.__setattr__(self, "grid_step_deg", step)

    @property
    def grid_size(self) -> int:
        return round(360.0 / self.grid_step_deg)


@dataclass(frozen=True)
class ChshResult:
    """One evaluated (or searched) CHSH point.

    ``terms`` stores the six probabilities in the order joint(x1,x2),
    joint(x1,x2'), joint(x1',x2), joint(x1',x2'), marginal1(x1'),
    marginal2(x2); recombining them with signs (+,-,+,+,-,-) reproduces
    ``s_value`` exactly.
    """

    beta: float
    model: CorrelationModel
    angles: AngleQuad
    terms: tuple[float, float, float, float, float, float]
    s_value: float
    violated: bool

    def recombine(self) -> float:
        t = self.terms
        return t[0] - t[1] + t[2] + t[3] - t[4] - t[5]


def is_violation(s: float) -> bool:
    """Outside the local-hidden-variable interval [-1, 0], either side."""
    return s < -1.0 or s > 0.0


def s_value(model: CorrelationModel, speed: Speed, quad: AngleQuad) -> ChshResult:
    """Evaluate the six-term CHSH combination at one angle quadruple."""
    terms = (
        float(joint(model, speed, quad.chi1, quad.chi2)),
        float(joint(model, speed, quad.chi1, quad.chi2p)),
        float(joint(model, speed, quad.chi1p, quad.chi2)),
        float(joint(model, speed, quad.chi1p, quad.chi2p)),
        float(marginal(model, speed, 1, quad.chi1p)),
        float(marginal(model, speed, 2, quad.chi2)),
    )
    s = terms[0] - terms[1] + terms[2] + terms[3] - terms[4] - terms[5]
    return ChshResult(
        beta=speed.beta,
        model=model,
        angles=quad,
        terms=terms,
        s_value=s,
        violated=is_violation(s),
    )


def _s_raw(model: CorrelationModel, speed: Speed) -> Callable[[np.ndarray], float]:
    def evaluate(angles: np.ndarray) -> float:
        x1, x2, x1p, x2p = angles
        return float(
            joint(model, speed, x1, x2)
            - joint(model, speed, x1, x2p)
            + joint(model, speed, x1p, x2)
            + joint(model, speed, x1p, x2p)
            - marginal(model, speed, 1, x1p)
            - marginal(model, speed, 2, x2)
        )

    return evaluate


def _coarse_minimum(model: CorrelationModel, speed: Speed, settings: SearchSettings):
    """Exact 4D grid argmin, decomposed so the work is cubic in grid size.

    For fixed (x1, x1') the x2 and x2' contributions separate:
    S = [P(x1,x2) + P(x1',x2) - m2(x2)] + [P(x1',x2') - P(x1,x2') - m1(x1')].
    Ties are broken toward the lexicographically smallest (x1,x2,x1',x2').
    """
    n = settings.grid_size
    grid = np.radians(np.arange(n) * settings.grid_step_deg)
    p = joint(model, speed, grid[:, None], grid[None, :])
    m1 = np.asarray(marginal(model, speed, 1, grid), dtype=float)
    m2 = np.asarray(marginal(model, speed, 2, grid), dtype=float)

    part_a = p[:, None, :] + p[None, :, :] - m2[None, None, :]     # [i, k, j]
    part_b = p[None, :, :] - p[:, None, :] - m1[None, :, None]     # [i, k, l]
    best_j = part_a.argmin(axis=2)   # first occurrence = smallest j on ties
    best_l = part_b.argmin(axis=2)
    total = part_a.min(axis=2) + part_b.min(axis=2)

    best = None
    for i in range(n):
        for k in range(n):
            key = (total[i, k], i, int(best_j[i, k]), k, int(best_l[i, k]))
            if best is None or key < best:
                best = key
    _, i, j, k, l = best
    return AngleQuad(grid[i], grid[j], grid[k], grid[l])


def _refine(model, speed, settings, start: AngleQuad) -> AngleQuad:
    objective = _s_raw(model, speed)
    x0 = np.array(start.as_tuple())
    step = math.radians(settings.grid_step_deg) / 2.0
    simplex = np.vstack([x0] + [x0 + step * basis for basis in np.eye(4)])
    result = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxiter": settings.max_iterations,
            "fatol": settings.s_tolerance,
            "xatol": 1e-8,
        },
    )
    refined = AngleQuad(*(float(a) % TWO_PI for a in result.x))
    if objective(np.array(refined.as_tuple())) <= objective(x0):
        return refined
    return start


def search_violation(
    model: CorrelationModel, speed: Speed, settings: SearchSettings | None = None
) -> ChshResult:
    """Minimize S over all angle quadruples: coarse grid, then refinement."""
    settings = settings or SearchSettings()
    coarse = _coarse_minimum(model, speed, settings)
    refined = _refine(model, speed, settings, coarse)
    return s_value(model, speed, refined)


def beta_scan(
    model: CorrelationModel,
    speeds: Sequence[Speed] | Iterable[Speed],
    settings: SearchSettings | None = None,
) -> list[ChshResult]:
    """One violation search per speed, in input order."""
    speeds = list(speeds)
    if not speeds:
        raise ValueError("beta_scan needs at least one speed")
    return [search_violation(model, speed, settings) for speed in speeds]


def violation_fraction(results: Sequence[ChshResult]) -> float:
    """Fraction of scan rows whose best S leaves the [-1, 0] interval."""
    if not results:
        return 0.0
    return sum(1 for r in results if r.violated) / len(results)


SCAN_CSV_COLUMNS = (
    "beta",
    "model",
    "chi1_deg",
    "chi2_deg",
    "chi1p_deg",
    "chi2p_deg",
    "S",
    "violated",
)

TERM_NAMES = (
    "joint_11",
    "joint_12p",
    "joint_1p2",
    "joint_1p2p",
    "marginal_1p",
    "marginal_2",
)


def scan_csv(results: Sequence[ChshResult]) -> str:
    """Render scan rows as CSV; floats use repr so parsing round-trips exactly."""
    lines = [",".join(SCAN_CSV_COLUMNS)]
    for r in results:
        degs = r.angles.degrees_mod_360()
        cells = [repr(r.beta), r.model.value]
        cells += [repr(a) for a in degs]
        cells += [repr(r.s_value), "true" if r.violated else "false"]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def scan_json_payload(results: Sequence[ChshResult]) -> list[dict]:
    """JSON mirror of the CSV rows, with the six per-term probabilities."""
    payload = []
    for r in results:
        degs = r.angles.degrees_mod_360()
        payload.append(
            {
                "beta": r.beta,
                "model": r.model.value,
                "angles_deg": {
                    "chi1": degs[0],
                    "chi2": degs[1],
                    "chi1p": degs[2],
                    "chi2p": degs[3],
                },
                "terms": dict(zip(TERM_NAMES, r.terms)),
                "S": r.s_value,
                "violated": r.violated,
            }
        )
    return payload
