"""Evaluation budgets shared by the big-step evaluators and the harness."""

from __future__ import annotations

__all__ = ["OutOfFuel", "FuelMeter"]


class OutOfFuel(Exception):
    def __init__(self, kind: str):
        super().__init__(kind)
        self.kind = kind  # "beta" or "work"


class FuelMeter:
    """Counts beta contractions against a budget, plus an optional coarse
    work allowance (nodes touched) that stops runaway term growth."""

    def __init__(self, betas: int, work: int | None = None):
        self.limit = betas
        self.betas = 0
        self.work_limit = work
        self.work = 0

    def spend(self) -> None:
        self.betas += 1
        if self.betas > self.limit:
            raise OutOfFuel("beta")

    def charge(self, nodes: int) -> None:
        if self.work_limit is None:
            return
        self.work += nodes
        if self.work > self.work_limit:
            raise OutOfFuel("work")
