"""Exception hierarchy shared by the estimators, asymptotics and CLI."""

from __future__ import annotations


class EvtError(Exception):
    """Base class for every error raised by :mod:`evtpwm`."""


class DomainError(EvtError, ValueError):
    """An argument lies outside the domain of a function or estimator."""


class NonIdentifiable(EvtError):
    """Sample statistics are inconsistent with the model (no solution exists)."""


class ModelBoundary(EvtError):
    """The fitted extreme value index reached the pole of Γ(1 − γ)."""


class ExtrapolationDomain(EvtError, ValueError):
    """Requested exceedance probability is not in the extrapolation range."""


class DegenerateExcesses(EvtError):
    """All top order statistics coincide with the threshold."""


class QuadratureError(EvtError):
    """Numerical integration did not reach the requested tolerance."""


class ExcessiveFailures(EvtError):
    """Too many Monte Carlo replications produced unusable fits."""


class InputFormatError(EvtError):
    """Malformed CSV input."""


class OutputError(EvtError):
    """The output destination could not be written."""
