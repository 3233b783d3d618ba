"""Sparsity penalties on the non-negative half-line and their derivatives."""

from dataclasses import dataclass

from .errors import InvalidInput

DEFAULT_SCAD_A = 3.7
DEFAULT_MCP_B = 3.0

_KINDS = ("none", "lasso", "scad", "mcp")


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty family with its regularization strength and shape parameter.

    ``a`` is the SCAD shape (> 2), ``b`` the MCP shape (> 0); both ignored
    for the other kinds.
    """

    kind: str = "lasso"
    lam: float = 0.01
    a: float = DEFAULT_SCAD_A
    b: float = DEFAULT_MCP_B

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInput(f"unknown penalty kind: {self.kind!r}")
        if self.lam < 0:
            raise InvalidInput("lambda must be non-negative")
        if self.kind == "scad" and not self.a > 2:
            raise InvalidInput("SCAD shape parameter must exceed 2")
        if self.kind == "mcp" and not self.b > 0:
            raise InvalidInput("MCP shape parameter must be positive")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "lambda": self.lam}
        if self.kind == "scad":
            d["a"] = self.a
        elif self.kind == "mcp":
            d["b"] = self.b
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PenaltySpec":
        return cls(
            kind=d.get("kind", "lasso"),
            lam=float(d.get("lambda", d.get("lam", 0.01))),
            a=float(d.get("a", DEFAULT_SCAD_A)),
            b=float(d.get("b", DEFAULT_MCP_B)),
        )


def penalty_value(spec: PenaltySpec, x: float) -> float:
    """Penalty evaluated at x >= 0; continuous, zero at the origin."""
    if x < 0:
        raise InvalidInput("penalty argument must be non-negative")
    lam = spec.lam
    if spec.kind == "none":
        return 0.0
    if spec.kind == "lasso":
        return lam * x
    if spec.kind == "scad":
        a = spec.a
        # left branch at the knots; the value is continuous either way
        if x <= lam:
            return lam * x
        if x <= a * lam:
            return (2.0 * a * lam * x - x * x - lam * lam) / (2.0 * (a - 1.0))
        return 0.5 * (a + 1.0) * lam * lam
    b = spec.b
    if x <= b * lam:
        return lam * x - x * x / (2.0 * b)
    return lam * lam * b / 2.0


def penalty_derivative(spec: PenaltySpec, x: float) -> float:
    """Right derivative of the penalty at x >= 0; non-increasing for
    SCAD/MCP and vanishing beyond their plateaus."""
    if x < 0:
        raise InvalidInput("penalty argument must be non-negative")
    lam = spec.lam
    if spec.kind == "none":
        return 0.0
    if spec.kind == "lasso":
        return lam
    if spec.kind == "scad":
        if x <= lam:
            return lam
        return max(spec.a * lam - x, 0.0) / (spec.a - 1.0)
    return max(lam - x / spec.b, 0.0)
