"""Residual records produced by identity checks."""
from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class ResidualReport:
    identity_id: str
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    tol: float
    passed: bool
    n_evals_total: int = 0

    @classmethod
    def compare(cls, identity_id: str, lhs, rhs, tol: float, n_evals: int = 0) -> "ResidualReport":
        lhs, rhs = complex(lhs), complex(rhs)
        a = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs))
        r = a / scale if scale > 0 else 0.0
        return cls(identity_id, lhs, rhs, a, r, tol, bool(a <= tol or r <= tol), int(n_evals))

    def with_tol(self, tol: float) -> "ResidualReport":
        return ResidualReport(self.identity_id, self.lhs, self.rhs, self.abs_residual,
                              self.rel_residual, tol,
                              bool(self.abs_residual <= tol or self.rel_residual <= tol),
                              self.n_evals_total)

    def to_dict(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "lhs_re": self.lhs.real, "lhs_im": self.lhs.imag,
            "rhs_re": self.rhs.real, "rhs_im": self.rhs.imag,
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "tol": self.tol,
            "pass": self.passed,
            "n_evals_total": self.n_evals_total,
        }

    def __str__(self):
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag} {self.identity_id}: lhs={self.lhs:.12g} rhs={self.rhs:.12g} "
                f"abs={self.abs_residual:.2e} rel={self.rel_residual:.2e} tol={self.tol:.0e}")


def reports_to_json(reports, indent: int | None = 2) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=indent)
