#!/usr/bin/env python3
"""
Dilation Generator - Carnot Lab
The infinitesimal generator Z_x of the dilations centred at x.
"""

from typing import Optional, Sequence

import numpy as np

from carnot_lab.homogeneous_metrics import HomogeneousNorm
from carnot_lab.stratified_algebra import CarnotGroup


class DilationGenerator:
    """Z_x(y) = L_x* Z_0(x^{-1} y) with Z_0(z) = sum_I ord(I) z_I d/dz_I"""

    def __init__(self, group: CarnotGroup, center: Optional[Sequence[float]] = None):
        self.group = group
        self.center = group.identity() if center is None else np.asarray(center, dtype=float)
        self._weights = group.ord.astype(float)

    def local(self, y: np.ndarray) -> np.ndarray:
        return self.group.mul(self.group.inverse(self.center), np.asarray(y, dtype=float))

    def __call__(self, y: np.ndarray) -> np.ndarray:
        """Frame coordinates of Z_x at y"""
        z = self.local(y)
        return np.einsum("...ij,...j->...i", self.group.frame_inverse(z), self._weights * z)

    def coordinates(self, y: np.ndarray) -> np.ndarray:
        """Coordinate expression of Z_x at y"""
        y = np.asarray(y, dtype=float)
        return np.einsum("...ij,...j->...i", self.group.frame(y), self(y))

    def horizontal(self, y: np.ndarray) -> np.ndarray:
        return self(y)[..., :self.group.h1]

    def euler_residual(self, norm: HomogeneousNorm, y: np.ndarray) -> np.ndarray:
        """<Z_x, grad rho_x> - rho_x, zero by homogeneity of rho"""
        z = self.local(y)
        return np.sum(self(y) * norm.gradient(z), axis=-1) - norm(z)
