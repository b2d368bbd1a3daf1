"""Exception types shared across the solver."""


class SwrouteError(Exception):
    """Base class for all package errors."""


class ScenarioValidationError(SwrouteError):
    """Raised when a scenario document violates model invariants.

    Carries the full list of violations so a CLI run can report every
    problem at once instead of failing on the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class InconsistentTimings(SwrouteError):
    """Route departure times violate the travel model."""


class InfeasiblePattern(SwrouteError):
    """No visit sequence satisfies the primary constraints."""


class NonConvergence(SwrouteError):
    """Placement solver hit its iteration cap before stabilizing."""


class GridTooLarge(SwrouteError):
    """Grid-search oracle would exceed its node budget."""


class FrozenPointConflict(SwrouteError):
    """A replan pattern groups a frozen pickup with windows excluding it."""


class Violation:
    """One named validation/constraint violation (code plus context)."""

    __slots__ = ("code", "detail")

    def __init__(self, code, detail=""):
        self.code = code
        self.detail = detail

    def __repr__(self):
        return f"{self.code}({self.detail})" if self.detail else self.code

    def __eq__(self, other):
        if isinstance(other, str):
            return self.code == other
        return (
            isinstance(other, Violation)
            and self.code == other.code
            and self.detail == other.detail
        )

    def __hash__(self):
        return hash((self.code, self.detail))
