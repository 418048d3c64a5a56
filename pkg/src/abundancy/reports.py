"""Result records shared by the checkers."""
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CriterionReport:
    """Verdict of one inequality on one integer.

    ``margin`` is rhs - lhs in the criterion's natural scale, so ``holds``
    agrees with ``margin > 0`` except for boundary conventions noted in
    ``note``. A log-space verdict whose margin is inside ``error_bound`` is
    flagged ``indeterminate`` rather than trusted.
    """
    n: Any
    criterion: str
    holds: bool
    margin: float
    mode: str  # "exact_rational" or "log_space"
    indeterminate: bool = False
    error_bound: float = 0.0
    note: str = ""
    extra: dict = field(default_factory=dict, compare=False)
