"""Compare exact counts with c * B log B (natural log)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .enumeration import CountResult


@dataclass(frozen=True)
class ConvergenceRow:
    B: int
    count: int
    ratio: float  # count / (B log B)
    prediction: float
    relative_gap: float  # ratio / prediction - 1
    residual_per_B: float  # (count - c B log B) / B

    def as_row(self) -> dict:
        return {
            "B": self.B,
            "count": self.count,
            "ratio": self.ratio,
            "prediction": self.prediction,
            "relative_gap": self.relative_gap,
            "residual_per_B": self.residual_per_B,
        }


def convergence_table(results: Sequence[CountResult], c: float) -> list[ConvergenceRow]:
    if not results:
        return []
    if not c > 0:
        raise ValueError("prediction must be positive")
    if len({r.divisor for r in results}) > 1:
        raise ValueError("results mix divisors")
    rows = []
    for r in sorted(results, key=lambda r: r.bound):
        blog = r.bound * math.log(r.bound)
        # B = 1 has log B = 0; the ratio is undefined there
        ratio = r.count / blog if blog > 0 else math.nan
        rows.append(
            ConvergenceRow(
                B=r.bound,
                count=r.count,
                ratio=ratio,
                prediction=c,
                relative_gap=ratio / c - 1.0,
                residual_per_B=(r.count - c * blog) / r.bound,
            )
        )
    return rows


def residual_growth(rows: Sequence[ConvergenceRow]) -> float:
    """max |residual| over the rows divided by |residual| at the smallest B."""
    first = abs(rows[0].residual_per_B)
    worst = max(abs(r.residual_per_B) for r in rows)
    return worst / first if first > 0 else math.inf


def fit_two_term(results: Sequence[CountResult]) -> tuple[float, float]:
    """Least-squares (c, c2) for N(B) ~ c B log B + c2 B.

    Both columns are scaled to unit norm and the system is solved by SVD, so
    exact two-term data is recovered to rounding error.
    """
    if len(results) < 3:
        raise ValueError("need at least three results")
    bs = np.array([r.bound for r in results], dtype=np.float64)
    if len(set(bs.tolist())) < 2:
        raise ValueError("singular design: all bounds equal")
    design = np.column_stack([bs * np.log(bs), bs])
    norms = np.linalg.norm(design, axis=0)
    ys = np.array([float(r.count) for r in results])
    sol, _, rank, _ = np.linalg.lstsq(design / norms, ys, rcond=None)
    if rank < 2:
        raise ValueError("singular design")
    c, c2 = sol / norms
    return float(c), float(c2)
