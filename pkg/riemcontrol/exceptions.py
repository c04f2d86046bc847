# -*- coding: utf-8 -*-
"""
Exceptions raised by the geometric kernel, the integrators, the control laws
and the scenario runner.

Created on Sat Oct 17 09:12:40 2026

@author: riemcontrol developers
"""


class RiemcontrolError(Exception):
    """Base class of every error raised by the package."""


class BasepointMismatch(RiemcontrolError):
    pass


class ConstraintViolation(RiemcontrolError):
    """Coordinates do not satisfy the constraints of the manifold."""


class InjectivityRadiusExceeded(RiemcontrolError):
    pass


class AtCutLocus(InjectivityRadiusExceeded):
    """The target point is on (or beyond) the cut locus of the base point."""


class GridTooCoarse(RiemcontrolError):
    pass


class DegenerateInput(RiemcontrolError):
    pass


class StepTooLarge(RiemcontrolError):
    pass


class ConstraintDrift(RiemcontrolError):
    pass


class NeighborLeftInjectivityGuard(RiemcontrolError):
    pass


class NotAGeodesic(RiemcontrolError):
    pass


class NotOnTrajectory(RiemcontrolError):
    pass


class NotKilling(RiemcontrolError):
    pass


class BeyondValidityRange(RiemcontrolError):
    pass


class NonPositiveSample(RiemcontrolError):
    pass


class WindowTooSmall(RiemcontrolError):
    pass


class GainOutOfRange(RiemcontrolError):
    pass


class ConfigInvalid(RiemcontrolError):
    pass
