#!/usr/bin/env python3
"""
Polynomials - Carnot Lab
Sparse multivariate polynomials used as graph heights.
"""

from math import comb
from itertools import product
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

Exponent = Tuple[int, ...]

ZERO_COEFF = 0.0


class Polynomial:
    """Sum of c_e * prod(z_j ** e_j) over a sparse exponent map"""

    def __init__(self, terms: Mapping[Sequence[int], float], nvars: Optional[int] = None):
        clean: Dict[Exponent, float] = {}
        for exponent, coeff in terms.items():
            key = tuple(int(e) for e in exponent)
            if any(e < 0 for e in key):
                raise ValueError(f"negative exponent {key}")
            if coeff != ZERO_COEFF:
                clean[key] = clean.get(key, 0.0) + float(coeff)
        if nvars is None:
            if not clean:
                raise ValueError("nvars is required for the zero polynomial")
            nvars = len(next(iter(clean)))
        if any(len(key) != nvars for key in clean):
            raise ValueError(f"every exponent must have length {nvars}")
        self.nvars = nvars
        self.terms = dict(sorted(clean.items()))
        self._exp = np.array(list(self.terms), dtype=int).reshape(-1, nvars)
        self._coef = np.array(list(self.terms.values()), dtype=float)

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls({}, nvars)

    @classmethod
    def linear(cls, gradient: Sequence[float], constant: float = 0.0) -> "Polynomial":
        nvars = len(gradient)
        terms = {tuple([0] * nvars): constant}
        for j, g in enumerate(gradient):
            e = [0] * nvars
            e[j] = 1
            terms[tuple(e)] = g
        return cls(terms, nvars)

    def __repr__(self) -> str:
        return f"Polynomial({self.terms})"

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if not self.terms:
            return np.zeros(z.shape[:-1])
        powers = np.prod(z[..., None, :] ** self._exp, axis=-1)
        return powers @ self._coef

    def derivative(self, var: int, times: int = 1) -> "Polynomial":
        out: Dict[Exponent, float] = {}
        for exponent, coeff in self.terms.items():
            e = exponent[var]
            if e < times:
                continue
            factor = float(np.prod(np.arange(e - times + 1, e + 1)))
            key = list(exponent)
            key[var] = e - times
            out[tuple(key)] = out.get(tuple(key), 0.0) + coeff * factor
        return Polynomial(out, self.nvars)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        return np.stack([self.derivative(j)(z) for j in range(self.nvars)], axis=-1)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, 0.0) + c
        return Polynomial(terms, self.nvars)

    def scaled(self, factor: float) -> "Polynomial":
        return Polynomial({k: factor * c for k, c in self.terms.items()}, self.nvars)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: Dict[Exponent, float] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                key = tuple(a + b for a, b in zip(ka, kb))
                out[key] = out.get(key, 0.0) + ca * cb
        return Polynomial(out, self.nvars)

    def compose(self, inner: Sequence["Polynomial"]) -> "Polynomial":
        """The polynomial z -> p(q_1(z), ..., q_m(z)) for polynomials q_j in a common set of variables"""
        if len(inner) != self.nvars:
            raise ValueError(f"compose needs {self.nvars} inner polynomials, got {len(inner)}")
        nvars = inner[0].nvars if inner else 0
        one = Polynomial({tuple([0] * nvars): 1.0}, nvars)
        powers: Dict[Tuple[int, int], Polynomial] = {}

        def power(j: int, e: int) -> Polynomial:
            if e == 0:
                return one
            if (j, e) not in powers:
                powers[(j, e)] = power(j, e - 1) * inner[j]
            return powers[(j, e)]

        total = Polynomial.zero(nvars)
        for exponent, coeff in self.terms.items():
            term = one.scaled(coeff)
            for j, e in enumerate(exponent):
                term = term * power(j, e)
            total = total + term
        return total

    def shifted(self, offset: Sequence[float]) -> "Polynomial":
        """The polynomial z -> p(z + offset), expanded exactly"""
        offset = [float(o) for o in offset]
        out: Dict[Exponent, float] = {}
        for exponent, coeff in self.terms.items():
            for sub in product(*[range(e + 1) for e in exponent]):
                factor = coeff
                for e, s, o in zip(exponent, sub, offset):
                    factor *= comb(e, s) * o ** (e - s)
                if factor != 0.0:
                    out[sub] = out.get(sub, 0.0) + factor
        return Polynomial(out, self.nvars)

    def dilated(self, weights: Sequence[int], t: float) -> "Polynomial":
        """The polynomial z -> p(t^w_1 z_1, ..., t^w_m z_m)"""
        w = np.asarray(weights, dtype=int)
        return Polynomial({k: c * t ** int(np.dot(w, k)) for k, c in self.terms.items()}, self.nvars)

    def weighted_degrees(self, weights: Sequence[int]) -> Dict[Exponent, int]:
        w = np.asarray(weights, dtype=int)
        return {k: int(np.dot(w, k)) for k in self.terms}

    def part(self, weights: Sequence[int], keep) -> "Polynomial":
        """Monomials whose weighted degree satisfies keep(degree)"""
        degrees = self.weighted_degrees(weights)
        return Polynomial({k: c for k, c in self.terms.items() if keep(degrees[k])}, self.nvars)

    def as_config(self) -> Dict[str, float]:
        return {",".join(str(e) for e in k): c for k, c in self.terms.items()}

    @classmethod
    def from_config(cls, data: Mapping[str, float], nvars: int) -> "Polynomial":
        """Keys are comma-separated exponent tuples, e.g. "2,0" for z_1^2"""
        terms = {}
        for key, value in data.items():
            exponent = tuple(int(part) for part in str(key).replace(" ", "").split(","))
            terms[exponent] = float(value)
        return cls(terms, nvars)


def fit_taylor(f, nvars: int, degree: int, step: float = 1e-3, half_width: int = 3) -> Polynomial:
    """Least-squares polynomial of total degree <= degree fitted on a small grid around 0"""
    axis = step * np.arange(-half_width, half_width + 1)
    grid = np.stack(np.meshgrid(*[axis] * nvars, indexing="ij"), axis=-1).reshape(-1, nvars)
    exps = list(monomials_up_to(nvars, degree))
    design = np.stack([np.prod(grid ** np.asarray(e), axis=1) for e in exps], axis=1)
    values = np.asarray(f(grid), dtype=float)
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    return Polynomial(dict(zip(exps, coef)), nvars)


def monomials_up_to(nvars: int, degree: int) -> Iterable[Exponent]:
    for exponent in product(range(degree + 1), repeat=nvars):
        if sum(exponent) <= degree:
            yield exponent
