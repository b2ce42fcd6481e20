#!/usr/bin/env python3
"""
Stratified Algebra - Carnot Lab
Stratified nilpotent Lie algebras and their Carnot groups in exponential coordinates.

Indices are 0-based internally and follow the graded ordering, so every layer is a
contiguous slice. The left-invariant frame X_1..X_n is declared orthonormal.
"""

import os
import logging
from math import factorial
from typing import Dict, List, Optional, Any, Sequence, Tuple, Union
from dataclasses import dataclass, field

import numpy as np
import yaml

from carnot_lab.errors import CapabilityError, ConfigError, DomainError, StructureError

logger = logging.getLogger(__name__)

MAX_STEP = 4
STRUCTURE_TOL = 1e-12

# coefficients of ad/(1 - exp(-ad)); the frame is its power series in ad_x
_FRAME_SERIES = (1.0, 0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0)

ArrayLike = Union[np.ndarray, Sequence[float]]


@dataclass(frozen=True, eq=False)
class StratifiedAlgebra:
    """Structure constants C[R, I, J] = <[X_I, X_J], X_R> with a layer grading"""
    growth: Tuple[int, ...]
    constants: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        growth = tuple(int(h) for h in self.growth)
        constants = np.array(self.constants, dtype=float)
        constants.setflags(write=False)
        object.__setattr__(self, "growth", growth)
        object.__setattr__(self, "constants", constants)

    @property
    def n(self) -> int:
        return int(sum(self.growth))

    @property
    def k(self) -> int:
        return len(self.growth)

    @property
    def ord(self) -> np.ndarray:
        """Layer index (1-based) of every coordinate"""
        return np.repeat(np.arange(1, self.k + 1), self.growth)

    @property
    def Q(self) -> int:
        return int(sum((i + 1) * h for i, h in enumerate(self.growth)))

    @property
    def h1(self) -> int:
        return self.growth[0] if self.growth else 0

    def layer_slice(self, layer: int) -> slice:
        """Index range of layer H_layer (1-based)"""
        if not 1 <= layer <= self.k:
            raise DomainError(f"layer {layer} outside 1..{self.k}")
        start = int(sum(self.growth[:layer - 1]))
        return slice(start, start + self.growth[layer - 1])

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "n": self.n, "step": self.k,
                "growth": list(self.growth), "Q": self.Q}


@dataclass
class StructureReport:
    """Outcome of verify_structure"""
    passed: bool
    checks: Dict[str, bool]
    failures: List[str]
    Q: Optional[int]


def verify_structure(alg: StratifiedAlgebra, tol: float = STRUCTURE_TOL) -> StructureReport:
    """Check shape, skew-symmetry, Jacobi, grading and layer generation"""
    checks: Dict[str, bool] = {}
    failures: List[str] = []
    C = alg.constants
    n = alg.n

    checks["shape"] = (alg.k >= 1 and all(h > 0 for h in alg.growth)
                       and C.shape == (n, n, n))
    if not checks["shape"]:
        failures.append(f"constants shape {C.shape} does not match growth {list(alg.growth)}")
        return StructureReport(False, checks, failures, None)

    skew = float(np.max(np.abs(C + C.transpose(0, 2, 1)), initial=0.0))
    checks["skew"] = skew <= tol
    if not checks["skew"]:
        failures.append(f"skew-symmetry defect {skew:.3e}")

    # [[a,b],c] + [[b,c],a] + [[c,a],b]
    t1 = np.einsum("ijc,jab->iabc", C, C)
    t2 = np.einsum("ija,jbc->iabc", C, C)
    t3 = np.einsum("ijb,jca->iabc", C, C)
    jacobi = float(np.max(np.abs(t1 + t2 + t3), initial=0.0))
    checks["jacobi"] = jacobi <= tol
    if not checks["jacobi"]:
        failures.append(f"Jacobi defect {jacobi:.3e}")

    order = alg.ord
    nonzero = np.argwhere(np.abs(C) > tol)
    bad = [(int(m), int(i), int(j)) for m, i, j in nonzero if order[m] != order[i] + order[j]]
    checks["grading"] = not bad
    if bad:
        m, i, j = bad[0]
        failures.append(
            f"grading violated: [X{i + 1},X{j + 1}] has a component on X{m + 1} "
            f"(layers {order[i]}+{order[j]} != {order[m]}); {len(bad)} offending entries")

    generated = True
    for layer in range(2, alg.k + 1):
        target = alg.layer_slice(layer)
        block = C[target][:, alg.layer_slice(1)][:, :, alg.layer_slice(layer - 1)]
        rank = np.linalg.matrix_rank(block.reshape(block.shape[0], -1), tol=1e-9)
        if rank != alg.growth[layer - 1]:
            generated = False
            failures.append(f"[H1,H{layer - 1}] spans dimension {rank} of H{layer} "
                            f"(dimension {alg.growth[layer - 1]})")
    checks["generation"] = generated

    passed = all(checks.values())
    if not passed:
        logger.debug("Algebra %s failed verification: %s", alg.name, failures)
    return StructureReport(passed, checks, failures, alg.Q if passed else None)


def algebra_from_triples(growth: Sequence[int], triples: Sequence[Sequence[float]],
                         name: str = "custom") -> StratifiedAlgebra:
    """Build an algebra from 1-based (R, I, J, value) triples; skew partners implied"""
    n = int(sum(growth))
    C = np.zeros((n, n, n))
    for entry in triples:
        if len(entry) != 4:
            raise StructureError(f"constant entry {list(entry)} must be [R, I, J, value]")
        r, i, j = (int(v) - 1 for v in entry[:3])
        if not all(0 <= v < n for v in (r, i, j)):
            raise StructureError(f"constant entry {list(entry)} has an index outside 1..{n}")
        value = float(entry[3])
        C[r, i, j] = value
        if C[r, j, i] == 0.0:
            C[r, j, i] = -value
    return StratifiedAlgebra(tuple(growth), C, name)


def heisenberg_algebra(dim: int = 1) -> StratifiedAlgebra:
    """Algebra of H^dim: [e_{2k-1}, e_{2k}] = e_{2n+1}"""
    if dim < 1:
        raise DomainError(f"Heisenberg dimension must be positive, got {dim}")
    triples = [[2 * dim + 1, 2 * j + 1, 2 * j + 2, 1.0] for j in range(dim)]
    return algebra_from_triples((2 * dim, 1), triples, name=f"h{dim}")


def engel_algebra() -> StratifiedAlgebra:
    """[e1,e2] = e3, [e1,e3] = [e2,e3] = e4"""
    triples = [[3, 1, 2, 1.0], [4, 1, 3, 1.0], [4, 2, 3, 1.0]]
    return algebra_from_triples((2, 1, 1), triples, name="engel")


ALGEBRA_PRESETS = {
    "h1": lambda: heisenberg_algebra(1),
    "h2": lambda: heisenberg_algebra(2),
    "h3": lambda: heisenberg_algebra(3),
    "engel": engel_algebra,
}


class CarnotGroup:
    """Vectorized group operations on arrays of shape (..., n)"""

    def __init__(self, algebra: StratifiedAlgebra):
        report = verify_structure(algebra)
        if not report.passed:
            raise StructureError(f"algebra '{algebra.name}' failed verification: "
                                 + "; ".join(report.failures))
        if algebra.k > MAX_STEP:
            raise CapabilityError(f"step {algebra.k} exceeds the supported maximum {MAX_STEP}")
        self.algebra = algebra
        self.n = algebra.n
        self.k = algebra.k
        self.Q = algebra.Q
        self.ord = algebra.ord
        self.C = algebra.constants
        self.name = algebra.name
        self._curvature = [algebra.constants[a, :algebra.h1, :algebra.h1]
                           for a in range(*self._second_layer_range())]

    def __repr__(self) -> str:
        return f"CarnotGroup({self.name}, growth={list(self.algebra.growth)})"

    def _second_layer_range(self) -> Tuple[int, int]:
        if self.k < 2:
            return (0, 0)
        s = self.algebra.layer_slice(2)
        return (s.start, s.stop)

    def layer_slice(self, layer: int) -> slice:
        return self.algebra.layer_slice(layer)

    @property
    def h1(self) -> int:
        return self.algebra.h1

    def _check(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.n,):
            raise StructureError(f"expected coordinates of length {self.n}, got shape {x.shape}")
        return x

    def identity(self) -> np.ndarray:
        return np.zeros(self.n)

    def bracket_coords(self, x: ArrayLike, y: ArrayLike) -> np.ndarray:
        """Coordinates of [x, y] for algebra elements x, y"""
        return np.einsum("rij,...i,...j->...r", self.C, self._check(x), self._check(y))

    def mul(self, a: ArrayLike, b: ArrayLike) -> np.ndarray:
        """BCH product truncated at brackets of length k"""
        a = self._check(a)
        b = self._check(b)
        ab = self.bracket_coords(a, b)
        z = a + b + 0.5 * ab
        if self.k >= 3:
            z = z + (self.bracket_coords(a, ab) - self.bracket_coords(b, ab)) / 12.0
        if self.k >= 4:
            z = z - self.bracket_coords(b, self.bracket_coords(a, ab)) / 24.0
        return z

    def inverse(self, x: ArrayLike) -> np.ndarray:
        return -self._check(x)

    def dilate(self, t: float, x: ArrayLike) -> np.ndarray:
        if not t > 0:
            raise DomainError(f"dilation factor must be positive, got {t}")
        return self._check(x) * np.power(float(t), self.ord)

    def ad(self, x: ArrayLike) -> np.ndarray:
        """Matrix of ad_x acting on coordinates"""
        return np.einsum("rij,...i->...rj", self.C, self._check(x))

    def _series(self, x: ArrayLike, coefficients: Sequence[float]) -> np.ndarray:
        A = self.ad(x)
        eye = np.broadcast_to(np.eye(self.n), A.shape)
        out = eye * coefficients[0]
        power = eye
        for c in coefficients[1:self.k]:
            power = power @ A
            if c != 0.0:
                out = out + c * power
        return out

    def frame(self, x: ArrayLike) -> np.ndarray:
        """Columns are the coordinate expressions of X_1(x)..X_n(x)"""
        return self._series(x, _FRAME_SERIES)

    def frame_inverse(self, x: ArrayLike) -> np.ndarray:
        """Maps coordinate vectors at x to frame coordinates"""
        return self._series(x, [(-1.0) ** m / factorial(m + 1) for m in range(MAX_STEP + 1)])

    def adjoint(self, x: ArrayLike) -> np.ndarray:
        """Ad of exp(x) in frame coordinates"""
        return self._series(x, [1.0 / factorial(m) for m in range(MAX_STEP + 1)])

    def curvature_matrices(self) -> List[np.ndarray]:
        """C^alpha_H for every alpha in the second layer"""
        return list(self._curvature)

    def curvature_constant(self) -> float:
        """Sum of spectral norms of the C^alpha_H"""
        return float(sum(np.linalg.norm(m, 2) for m in self._curvature))

    def point(self, coords: ArrayLike) -> "GroupPoint":
        return GroupPoint(self._check(coords).copy(), self)

    def vector(self, frame_coords: ArrayLike, base: Optional["GroupPoint"] = None) -> "TangentVector":
        base = base if base is not None else self.point(self.identity())
        return TangentVector(self._check(frame_coords).copy(), base)


@dataclass(frozen=True, eq=False)
class GroupPoint:
    """Exponential coordinates of the first kind"""
    coords: np.ndarray
    group: CarnotGroup = field(repr=False)

    def layer(self, i: int) -> np.ndarray:
        return self.coords[self.group.layer_slice(i)]


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Frame coordinates of a tangent vector at a base point"""
    frame_coords: np.ndarray
    base: GroupPoint

    def layer(self, i: int) -> np.ndarray:
        return self.frame_coords[self.base.group.layer_slice(i)]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.frame_coords))


def _same_group(a: GroupPoint, b: GroupPoint) -> CarnotGroup:
    if a.group is not b.group and a.group.algebra is not b.group.algebra:
        raise StructureError("points belong to different groups")
    return a.group


def group_mul(a: GroupPoint, b: GroupPoint) -> GroupPoint:
    group = _same_group(a, b)
    return group.point(group.mul(a.coords, b.coords))


def group_inverse(a: GroupPoint) -> GroupPoint:
    return a.group.point(a.group.inverse(a.coords))


def dilate(t: float, x: GroupPoint) -> GroupPoint:
    return x.group.point(x.group.dilate(t, x.coords))


def left_invariant_frame(x: GroupPoint) -> np.ndarray:
    return x.group.frame(x.coords)


def bracket(v: TangentVector, w: TangentVector) -> TangentVector:
    """Frame coordinates of [V, W] for the left-invariant extensions of v, w"""
    group = _same_group(v.base, w.base)
    if not np.array_equal(v.base.coords, w.base.coords):
        raise StructureError("bracket needs vectors at the same base point")
    return TangentVector(group.bracket_coords(v.frame_coords, w.frame_coords), v.base)


def resolve_group(name: str) -> CarnotGroup:
    """Build a preset group by name"""
    if name not in ALGEBRA_PRESETS:
        raise DomainError(f"unknown group preset '{name}'; known: {sorted(ALGEBRA_PRESETS)}")
    return CarnotGroup(ALGEBRA_PRESETS[name]())


def load_algebra(path: str) -> StratifiedAlgebra:
    """Algebra from a YAML file with `growth`, 1-based `constants` and an optional `name`"""
    try:
        with open(path, encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read algebra file '{path}': {exc}", key="group") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"algebra file '{path}' is not valid YAML: {exc}", key="group") from None
    if not isinstance(data, dict) or "growth" not in data or "constants" not in data:
        raise ConfigError(f"algebra file '{path}' needs 'growth' and 'constants'", key="group")
    name = str(data.get("name", os.path.splitext(os.path.basename(path))[0]))
    alg = algebra_from_triples([int(g) for g in data["growth"]], data["constants"], name)
    report = verify_structure(alg)
    if not report.passed:
        raise StructureError(f"algebra '{name}' failed verification: {'; '.join(report.failures)}")
    return alg
