"""Exception types shared across the laboratory."""

from __future__ import annotations


class SslabError(Exception):
    """Base class for all package-specific errors."""


class ParseError(SslabError):
    """Malformed expression or data-file text."""


class PoleError(SslabError):
    """Evaluation requested exactly at a pole."""


class EssentialPointError(SslabError):
    """Evaluation requested exactly at an essential point."""


class UnsupportedExpr(SslabError):
    """Operation not defined for this expression class (e.g. multi-term
    transcendental where a rational form is required)."""


class NotAlgebraic(SslabError):
    """Operation requires an algebraic (rational) expression."""


class NotIsolated(SslabError):
    """Requested point is not an isolated singularity."""


class JacobianSingular(SslabError):
    """Root of the spinor-collision equation with equal contact orders (or a
    singular Newton Jacobian); no winding index is defined there."""


class NonConvergent(SslabError):
    """A certified numerical limit failed its convergence test."""


class ClearanceError(SslabError):
    """Integration path passes too close to a pole or essential point."""


class QuadratureError(SslabError):
    """Adaptive quadrature could not reach the requested tolerance."""


class SingularPointError(SslabError):
    """Pointwise curvature requested on (or too near) the singular locus."""


class BadEndError(SslabError):
    """Contour machinery refused a puncture with a bad singular end."""


class NotAnInteger(SslabError):
    """A winding number failed to stabilise on an integer."""


class InconsistentLedger(SslabError):
    """Total-curvature identities disagree beyond tolerance."""


class ParamError(SslabError, ValueError):
    """Catalog constructor rejected its parameters."""
