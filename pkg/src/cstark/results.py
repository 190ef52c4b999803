"""Small result types shared by fuel-bounded searches."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Unknown:
    """A search ended without an answer after spending ``fuel``."""

    fuel: int
    progress: str = ""
    details: dict = field(default_factory=dict, compare=False)

    def __bool__(self):
        return False

    def __str__(self):
        extra = f" ({self.progress})" if self.progress else ""
        return f"unknown after fuel {self.fuel}{extra}"


class FuelMeter:
    """Counts units of work against a budget."""

    def __init__(self, budget: int):
        self.budget = budget
        self.spent = 0

    def take(self, amount: int = 1) -> bool:
        """Spend ``amount``; False when the budget is already used up."""
        if self.spent + amount > self.budget:
            return False
        self.spent += amount
        return True

    @property
    def left(self) -> int:
        return self.budget - self.spent

    def exhausted(self) -> bool:
        return self.spent >= self.budget
