# dilatekit/services/reports.py
"""Pydantic report models shared by the bound engine, sweeps and the CLI.

Field order is the serialized key order; do not reorder fields.
"""
from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, model_validator


class Hypothesis(BaseModel):
    name: str
    met: bool


class BoundReport(BaseModel):
    bound_name: str
    k: Optional[int] = None
    size: Optional[int] = None
    actual: int
    bound: int
    margin: int
    hypotheses: List[Hypothesis] = []
    satisfied: bool
    trivial: bool = False

    @model_validator(mode="after")
    def _consistent(self):
        if self.margin != self.actual - self.bound:
            raise ValueError("margin must equal actual - bound")
        if self.satisfied != (self.actual >= self.bound):
            raise ValueError("satisfied must equal actual >= bound")
        return self

    @classmethod
    def build(cls, bound_name: str, actual: int, bound: int,
              hypotheses: Optional[List[Hypothesis]] = None,
              k: Optional[int] = None, size: Optional[int] = None) -> "BoundReport":
        return cls(
            bound_name=bound_name,
            k=k,
            size=size,
            actual=actual,
            bound=bound,
            margin=actual - bound,
            hypotheses=hypotheses or [],
            satisfied=actual >= bound,
            trivial=bound <= 0,
        )

    @property
    def hypotheses_met(self) -> bool:
        return all(h.met for h in self.hypotheses)

    @property
    def violated(self) -> bool:
        """Bound fails while every recorded hypothesis holds."""
        return self.hypotheses_met and not self.satisfied


class LemmaPart(BaseModel):
    name: str
    active: bool
    value: int
    threshold: int
    holds: bool


class LemmaReport(BaseModel):
    """Outcome of 'hypotheses(instance) => conclusion(instance)' for one class index."""

    lemma: str
    k: int
    class_index: int
    applicable: bool
    reason: Optional[str] = None
    hypotheses: List[Hypothesis] = []
    parts: List[LemmaPart] = []

    @property
    def hypotheses_met(self) -> bool:
        return all(h.met for h in self.hypotheses)

    @property
    def vacuous(self) -> bool:
        return not self.applicable or not self.hypotheses_met or not any(p.active for p in self.parts)

    @property
    def violated(self) -> bool:
        return (self.applicable and self.hypotheses_met
                and any(p.active and not p.holds for p in self.parts))


class Violation(BaseModel):
    instance: dict
    detail: str
    confirmed: Optional[bool] = None


class SweepSummary(BaseModel):
    lemma: str
    instances_checked: int = 0
    vacuous: int = 0
    violations: List[Violation] = []
    min_margin: Optional[int] = None
    seed: Optional[int] = None

    def merge(self, other: "SweepSummary") -> "SweepSummary":
        margins = [m for m in (self.min_margin, other.min_margin) if m is not None]
        return SweepSummary(
            lemma=self.lemma,
            instances_checked=self.instances_checked + other.instances_checked,
            vacuous=self.vacuous + other.vacuous,
            violations=self.violations + other.violations,
            min_margin=min(margins) if margins else None,
            seed=self.seed,
        )
