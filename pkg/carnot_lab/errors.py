#!/usr/bin/env python3
"""
Errors - Carnot Lab
Exception hierarchy shared by every module of the toolkit.
"""

from typing import Optional


class CarnotLabError(Exception):
    """Base class for all toolkit errors"""


class StructureError(CarnotLabError, ValueError):
    """Invalid algebra, dimension mismatch or base-point mismatch"""


class DomainError(CarnotLabError, ValueError):
    """Argument outside the domain of an operation"""


class SingularityError(DomainError):
    """Evaluation at a point where the object is not smooth"""


class CharacteristicPointError(DomainError):
    """Quantity undefined at a characteristic point"""


class AdmissibilityError(DomainError):
    """Test function violates the boundary condition of a quotient"""


class ConfigError(CarnotLabError, ValueError):
    """Malformed or unresolvable configuration"""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message if key is None else f"{key}: {message}")
        self.key = key


class CapabilityError(CarnotLabError):
    """Request outside what the implementation supports"""


class GeometryError(CarnotLabError, ValueError):
    """Geometric input inconsistent with the surface it refers to"""


class PreconditionError(CarnotLabError, ValueError):
    """Hypothesis of a check not met; carries the computed bound"""

    def __init__(self, message: str, bound: Optional[float] = None):
        super().__init__(message)
        self.bound = bound


class ConvergenceWarning(UserWarning):
    """Adaptive quadrature stopped before reaching its tolerance"""
