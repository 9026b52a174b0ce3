"""
core/errors.py

Exception hierarchy shared by every topophase package.
"""

from dataclasses import dataclass


class TopoPhaseError(Exception):
    """Base class; the CLI turns any of these into exit code 2."""


class SingularityProximityError(TopoPhaseError):
    """A stencil or sample point came too close to a field singularity."""


class TubeIntersectionError(SingularityProximityError):
    """The sampled curl tube around a path touches a singularity."""


class NonFiniteError(TopoPhaseError):
    """NaN or Inf produced inside a stencil or field evaluation."""


class FieldCatalogError(TopoPhaseError):
    """Unknown field kind, degenerate axis or bad parameter."""


class PhaseError(TopoPhaseError):
    pass


class DualityError(TopoPhaseError):
    pass


class ConsistencyError(TopoPhaseError):
    """Two routes to the same relativistic quantity disagree."""


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    subject: str = ""

    def __str__(self):
        return f"[{self.code}] {self.message}"


class ScenarioError(TopoPhaseError):
    """
    Scenario document failed to parse or validate.

    `diagnostics` lists every problem found; `line`/`column` are set for
    JSON syntax errors.
    """

    def __init__(self, message, diagnostics=(), line=None, column=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics)
        self.line = line
        self.column = column

    def __str__(self):
        head = super().__str__()
        if not self.diagnostics:
            return head
        return head + "\n" + "\n".join(f"  {d}" for d in self.diagnostics)
