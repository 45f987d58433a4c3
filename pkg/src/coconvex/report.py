"""Uniform pass/fail record shared by the inequality lab and the solver audit."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

VIOLATION_TOL = 1e-8
EQUALITY_TOL = 1e-6


@dataclass
class CheckReport:
    """Outcome of one check, oriented so that ``slack >= 0`` means it holds."""

    name: str
    left: float
    right: float
    slack: float
    equality: bool
    passed: bool
    fingerprint: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @classmethod
    def from_sides(
        cls,
        name: str,
        left: float,
        right: float,
        fingerprint=None,
        details=None,
        violation_tol: float = VIOLATION_TOL,
        equality_tol: float = EQUALITY_TOL,
        slack_bounds=None,
    ) -> "CheckReport":
        """Report for ``left <= right``.

        ``slack_bounds`` may give a certified interval ``(lo, hi)`` for the
        slack when ``left`` is only known to lie in an interval; the pass
        decision then uses ``lo`` and the equality flag needs ``hi`` small.
        """
        slack = right - left
        lo, hi = slack_bounds if slack_bounds is not None else (slack, slack)
        scale = max(1.0, abs(right))
        passed = lo >= -violation_tol * scale
        equality = max(abs(lo), abs(hi)) <= equality_tol * scale
        return cls(
            name,
            float(left),
            float(right),
            float(slack),
            bool(equality and passed),
            bool(passed),
            dict(fingerprint or {}),
            dict(details or {}),
        )

    def to_record(self) -> dict:
        return asdict(self)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        eq = " (equality)" if self.equality else ""
        return f"{tag} {self.name}: left={self.left:.12g} right={self.right:.12g} slack={self.slack:.3e}{eq}"
