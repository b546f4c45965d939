"""Exception hierarchy.

Everything raised on purpose by this package derives from WintgenError so
callers can catch one type at the boundary.  Parse-time problems carry
location information; geometric refusals (umbilic point, degenerate metric,
non-ideal point where a canonical frame was requested) are separate classes
because the command line maps them to distinct exit codes.
"""

from __future__ import annotations


class WintgenError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------------------
# jet arithmetic


class OrderError(WintgenError):
    """Jet operands have mismatched truncation orders."""


class SingularJet(WintgenError):
    """Division by a jet whose constant term is zero."""


class DomainError(WintgenError):
    """Elementary function applied outside its domain (e.g. sqrt of a
    jet with non-positive constant term)."""


# ---------------------------------------------------------------------------
# parsing / input schema


class ParseError(WintgenError):
    """Syntax error in an expression or an immersion file."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            loc = f"line {line}"
            if col is not None:
                loc += f", col {col}"
            msg = f"{msg} ({loc})"
        super().__init__(msg)


class UnknownIdentifier(ParseError):
    """Expression references a name that is neither a domain variable nor a
    known constant or function."""


class SchemaError(WintgenError):
    """Immersion file is syntactically fine but structurally invalid
    (missing fields, wrong component count, bad domain)."""


class EvalError(WintgenError):
    """Expression evaluation failed at a concrete point."""


class ShapeError(WintgenError):
    """Array argument has the wrong shape or dimension."""


# ---------------------------------------------------------------------------
# geometric refusals


class NotImmersed(WintgenError):
    """The map fails to be an immersion at the requested point (the induced
    metric is singular or the ambient constraint is violated)."""


class UmbilicPoint(WintgenError):
    """Totally umbilic point: the trace-free second fundamental form
    vanishes, so the conformal factor and everything built on it is
    undefined."""


class NotIdealPoint(WintgenError):
    """A canonical frame was requested at a point where the equality case of
    the normal-scalar-curvature inequality fails, so the shared kernel
    direction does not exist."""


class InsufficientOrder(WintgenError):
    """The requested analysis needs more jet coefficients than the supplied
    truncation order provides."""


class NotLorentz(WintgenError):
    """Matrix supplied as a conformal transformation does not preserve the
    Lorentz form (or reverses time orientation)."""


class ChartBlowUp(WintgenError):
    """A conformal transformation sends the evaluation point out of the
    stereographic chart (denominator of the projection vanishes)."""


class IntegrableDistribution(WintgenError):
    """The two-plane distribution spanned by the canonical tangent pair is
    integrable (the torsion scalar vanishes), so quotient invariants that
    divide by it are undefined."""


class DegenerateCurve(WintgenError):
    """A holomorphic-curve datum is degenerate (derivative vanishes or the
    curve fails to be full)."""
