"""Team-efficiency measures for screening runs.

Human effort (HE) is the fraction of the corpus screened by humans;
inclusion rate (IR) is the fraction of all truly relevant documents found so
far. A screening run traces a curve of (HE, IR) points; the headline numbers
are the effort needed to reach a target inclusion rate and the effort/hours
saved against a baseline. The no-assistance baseline screens in random order,
whose expected curve is the diagonal IR = HE, so its effort at target t is t
exactly. The ideal curve screens only relevant documents and reaches IR 1.0
at HE = n_included / n.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import TargetNotReachedError, ValidationError

DEFAULT_PAPERS_PER_HOUR = 38.6


@dataclass(frozen=True)
class ScreeningStats:
    """Raw counts behind one curve point."""

    n: int
    n_included: int
    n_screened: int
    n_identified: int

    def __post_init__(self):
        if not (0 <= self.n_screened <= self.n):
            raise ValidationError("n_screened must be within [0, n]")
        if not (0 <= self.n_identified <= min(self.n_screened, self.n_included)):
            raise ValidationError(
                "n_identified must be within [0, min(n_screened, n_included)]"
            )


@dataclass(frozen=True)
class CurvePoint:
    screened: int
    identified: int
    he: float
    ir: float


@dataclass(frozen=True)
class HeIrCurve:
    """(HE, IR) after each screened document, in screening order."""

    n: int
    n_included: int
    points: tuple[CurvePoint, ...]

    def final_ir(self) -> float:
        return self.points[-1].ir if self.points else 0.0

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out)
        writer.writerow(["screened", "identified", "he", "ir"])
        for p in self.points:
            writer.writerow([p.screened, p.identified, repr(p.he), repr(p.ir)])
        return out.getvalue()


def human_effort(n_screened: int, n: int) -> float:
    """Fraction of the corpus screened manually."""
    if n <= 0:
        raise ValidationError("corpus size must be positive")
    if not (0 <= n_screened <= n):
        raise ValidationError(f"n_screened must be in [0, {n}], got {n_screened}")
    return n_screened / n


def inclusion_rate(n_identified: int, n_included: int) -> float:
    """Fraction of all relevant documents identified so far."""
    if n_included <= 0:
        raise ValidationError("n_included must be positive")
    if not (0 <= n_identified <= n_included):
        raise ValidationError(
            f"n_identified must be in [0, {n_included}], got {n_identified}"
        )
    return n_identified / n_included


def build_curve(
    screening_order: Sequence[str],
    oracle: Mapping[str, int],
    n: int,
    n_included: int,
) -> HeIrCurve:
    """Cumulative (HE, IR) after each screened document.

    ``oracle`` maps doc_id to 1 (included) or 0 and must cover every
    screened id. The order concatenates whatever phases actually screened
    the documents, so bootstrap and query batches contribute their diagonal
    segments and prioritized screening its steep one.
    """
    if n <= 0 or n_included <= 0:
        raise ValidationError("n and n_included must be positive")
    seen: set[str] = set()
    points: list[CurvePoint] = []
    identified = 0
    for i, doc_id in enumerate(screening_order, start=1):
        if doc_id in seen:
            raise ValidationError(f"duplicate id in screening order: {doc_id!r}")
        seen.add(doc_id)
        if doc_id not in oracle:
            raise ValidationError(f"oracle is missing screened id {doc_id!r}")
        identified += 1 if oracle[doc_id] == 1 else 0
        points.append(
            CurvePoint(
                screened=i,
                identified=identified,
                he=human_effort(i, n),
                ir=inclusion_rate(identified, n_included),
            )
        )
    return HeIrCurve(n=n, n_included=n_included, points=tuple(points))


def he_at_target(curve: HeIrCurve, target_ir: float = 0.8) -> float:
    """Smallest HE whose IR is at or above the target (step lookup)."""
    if not (0.0 < target_ir <= 1.0):
        raise ValidationError(f"target_ir must be in (0, 1], got {target_ir}")
    for p in curve.points:
        if p.ir >= target_ir:
            return p.he
    raise TargetNotReachedError(
        f"curve reaches IR {curve.final_ir():.4f}, below target {target_ir}",
        details={"max_ir": curve.final_ir(), "target_ir": target_ir},
    )


def effort_saved(he_baseline: float, he_new: float) -> tuple[float, float]:
    """(absolute, relative) effort saved against a baseline."""
    if he_baseline <= 0:
        raise ValidationError("baseline effort must be positive")
    absolute = he_baseline - he_new
    return absolute, absolute / he_baseline


def hours_saved(
    he_baseline: float,
    he_new: float,
    n: int,
    rate: float = DEFAULT_PAPERS_PER_HOUR,
) -> float:
    """Screening hours saved at a per-screener throughput in papers/hour."""
    if rate <= 0:
        raise ValidationError("screening rate must be positive")
    return (he_baseline - he_new) * n / rate


def summary_report(
    curve: HeIrCurve,
    target_ir: float = 0.8,
    he_baseline: float | None = None,
    rate: float = DEFAULT_PAPERS_PER_HOUR,
    f1: float | None = None,
) -> dict:
    """JSON-ready summary of one run.

    The baseline defaults to the no-assistance diagonal, whose effort at the
    target equals the target itself.
    """
    baseline = target_ir if he_baseline is None else he_baseline
    try:
        he = he_at_target(curve, target_ir)
        absolute, relative = effort_saved(baseline, he)
        saved_hours = hours_saved(baseline, he, curve.n, rate)
        reached = True
    except TargetNotReachedError:
        he = None
        absolute = relative = saved_hours = None
        reached = False
    report = {
        "target_ir": target_ir,
        "he_at_target": he,
        "target_reached": reached,
        "baseline_he": baseline,
        "effort_saved_abs": absolute,
        "effort_saved_rel": relative,
        "hours_saved": saved_hours,
        "f1": f1,
    }
    if target_ir == 0.8:
        report["he_at_80"] = he
    return report
