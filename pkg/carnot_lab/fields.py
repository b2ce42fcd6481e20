#!/usr/bin/env python3
"""
Fields - Carnot Lab
Ambient test functions and vector fields with frame derivatives.

Functions return values of shape (N,) and frame gradients (X_1 f, ..., X_n f) of shape
(N, n). Vector fields return frame coordinates of shape (N, n).
"""

from typing import Dict, Any, Optional, Sequence

import numpy as np

from carnot_lab.errors import ConfigError
from carnot_lab.homogeneous_metrics import HomogeneousNorm
from carnot_lab.polynomials import Polynomial
from carnot_lab.stratified_algebra import CarnotGroup

FD_STEP = 1e-5


class TestFunction:
    """Smooth function on the group"""
    __test__ = False

    def __init__(self, group: CarnotGroup, name: str = "function"):
        self.group = group
        self.name = name

    def __call__(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def frame_gradient(self, y: np.ndarray) -> np.ndarray:
        """Central differences along the frame flows"""
        y = np.asarray(y, dtype=float)
        out = np.empty(y.shape)
        for i in range(self.group.n):
            step = np.zeros(self.group.n)
            step[i] = FD_STEP
            out[..., i] = (self(self.group.mul(y, step)) - self(self.group.mul(y, -step))) / (2 * FD_STEP)
        return out

    def horizontal_gradient(self, y: np.ndarray) -> np.ndarray:
        return self.frame_gradient(y)[..., :self.group.h1]

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name}


class ConstantFunction(TestFunction):

    def __init__(self, group: CarnotGroup, value: float = 1.0):
        super().__init__(group, f"constant({value:g})")
        self.value = float(value)

    def __call__(self, y):
        return np.full(np.shape(y)[:-1], self.value)

    def frame_gradient(self, y):
        return np.zeros(np.shape(y))


class CoordinateFunction(TestFunction):
    """y -> y_I (0-based I)"""

    def __init__(self, group: CarnotGroup, index: int, scale: float = 1.0):
        if not 0 <= index < group.n:
            raise ConfigError(f"coordinate index {index + 1} outside 1..{group.n}")
        super().__init__(group, f"x{index + 1}")
        self.index = index
        self.scale = float(scale)

    def __call__(self, y):
        return self.scale * np.asarray(y, dtype=float)[..., self.index]

    def frame_gradient(self, y):
        return self.scale * self.group.frame(y)[..., self.index, :]


class PolynomialFunction(TestFunction):
    """Polynomial in the exponential coordinates"""

    def __init__(self, group: CarnotGroup, poly: Polynomial, name: str = "polynomial"):
        if poly.nvars != group.n:
            raise ConfigError(f"polynomial has {poly.nvars} variables, group has {group.n}")
        super().__init__(group, name)
        self.poly = poly

    def __call__(self, y):
        return self.poly(y)

    def frame_gradient(self, y):
        return np.einsum("...ij,...i->...j", self.group.frame(y), self.poly.gradient(y))

    def describe(self):
        return {"name": self.name, "terms": self.poly.as_config()}


class BumpFunction(TestFunction):
    """amplitude * (1 - (rho_c / r)^2)^2 inside B(c, r), zero outside"""

    def __init__(self, norm: HomogeneousNorm, center: Sequence[float], radius: float,
                 amplitude: float = 1.0):
        super().__init__(norm.group, "bump")
        if radius <= 0:
            raise ConfigError(f"bump radius must be positive, got {radius}")
        self.norm = norm
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.amplitude = float(amplitude)

    def _local(self, y):
        return self.group.mul(self.group.inverse(self.center), np.asarray(y, dtype=float))

    def __call__(self, y):
        u = self.norm(self._local(y)) / self.radius
        return self.amplitude * np.where(u < 1.0, (1.0 - u * u) ** 2, 0.0)

    def frame_gradient(self, y):
        z = self._local(y)
        rho = self.norm(z)
        u = rho / self.radius
        out = np.zeros(np.shape(z))
        active = (u < 1.0) & (rho > 0.0)
        if np.any(active):
            dpsi = -4.0 * u[active] * (1.0 - u[active] ** 2) / self.radius
            out[active] = self.amplitude * dpsi[:, None] * self.norm.gradient(z[active])
        return out

    def scaled(self, factor: float) -> "BumpFunction":
        return BumpFunction(self.norm, self.center, self.radius, self.amplitude * factor)

    def describe(self):
        return {"name": "bump", "center": self.center.tolist(), "radius": self.radius,
                "amplitude": self.amplitude}


class VectorField:
    """Frame coordinates of a vector field on the group"""

    def __init__(self, group: CarnotGroup, name: str):
        self.group = group
        self.name = name

    def __call__(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def horizontal(self) -> bool:
        return True

    def frame_jacobian(self, y: np.ndarray) -> np.ndarray:
        """J[..., l, i] = X_i(X^l) by central differences along the frame flows"""
        y = np.asarray(y, dtype=float)
        n = self.group.n
        J = np.empty(y.shape + (n,))
        for i in range(n):
            step = np.zeros(n)
            step[i] = FD_STEP
            J[..., :, i] = (self(self.group.mul(y, step)) - self(self.group.mul(y, -step))) / (2 * FD_STEP)
        return J

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name}


class ZeroField(VectorField):

    def __init__(self, group: CarnotGroup):
        super().__init__(group, "zero")

    def __call__(self, y):
        return np.zeros(np.shape(y))

    def frame_jacobian(self, y):
        return np.zeros(np.shape(y) + (self.group.n,))


class PositionField(VectorField):
    """Horizontal position x_H relative to a center"""

    def __init__(self, group: CarnotGroup, center: Optional[Sequence[float]] = None):
        super().__init__(group, "position")
        self.center = np.zeros(group.n) if center is None else np.asarray(center, dtype=float)

    def __call__(self, y):
        z = self.group.mul(self.group.inverse(self.center), np.asarray(y, dtype=float))
        out = np.zeros(z.shape)
        out[..., :self.group.h1] = z[..., :self.group.h1]
        return out


class RadialField(VectorField):
    """x_H / |x_H|; zero on the vertical axis"""

    def __init__(self, group: CarnotGroup):
        super().__init__(group, "radial")

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape)
        xh = y[..., :self.group.h1]
        r = np.linalg.norm(xh, axis=-1)
        safe = np.where(r > 0, r, 1.0)
        out[..., :self.group.h1] = np.where((r > 0)[..., None], xh / safe[..., None], 0.0)
        return out


class BumpField(VectorField):
    """psi * X_i for a bump psi"""

    def __init__(self, bump: BumpFunction, component: int):
        super().__init__(bump.group, f"bump*X{component + 1}")
        self.bump = bump
        self.component = component

    def __call__(self, y):
        out = np.zeros(np.shape(y))
        out[..., self.component] = self.bump(y)
        return out

    @property
    def horizontal(self):
        return self.component < self.group.h1

    def frame_jacobian(self, y):
        J = np.zeros(np.shape(y) + (self.group.n,))
        J[..., self.component, :] = self.bump.frame_gradient(y)
        return J


class LeftInvariantField(VectorField):
    """Constant frame coordinates w"""

    def __init__(self, group: CarnotGroup, w: Sequence[float]):
        super().__init__(group, "left-invariant")
        self.w = np.asarray(w, dtype=float)
        if self.w.shape != (group.n,):
            raise ConfigError(f"left-invariant field needs {group.n} components")

    def __call__(self, y):
        return np.broadcast_to(self.w, np.shape(y)).copy()

    @property
    def horizontal(self):
        return bool(np.all(self.w[self.group.h1:] == 0.0))

    def frame_jacobian(self, y):
        return np.zeros(np.shape(y) + (self.group.n,))
