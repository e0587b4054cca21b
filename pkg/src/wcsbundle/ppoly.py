"""Polynomials in the bundle parameter p.

``PPoly`` is a scalar polynomial stored sparsely by power;
``PGradedTensor`` is a tensor-valued polynomial stored as a dense stack
``grades[q]`` of equally shaped arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .tensor import DenseTensor, contract

__all__ = ["PPoly", "PGradedTensor", "ppoly_interpolate", "NORMALIZE_RTOL"]

NORMALIZE_RTOL = 1e-9


class PPoly:
    """Real polynomial ``sum_q coeffs[q] p**q``."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, float] | Iterable[float] = ()):
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = enumerate(coeffs)
        c = {}
        for q, v in items:
            q = int(q)
            if q < 0:
                raise ValueError("powers must be nonnegative")
            v = float(v)
            if v != 0.0:
                c[q] = c.get(q, 0.0) + v
        self._coeffs = dict(sorted(c.items()))

    @property
    def coeffs(self) -> dict[int, float]:
        return dict(self._coeffs)

    def __getitem__(self, q: int) -> float:
        return self._coeffs.get(q, 0.0)

    @property
    def degree(self) -> int:
        """Highest stored power, ``-1`` for the zero polynomial."""
        return max(self._coeffs, default=-1)

    def scale(self) -> float:
        return max((abs(v) for v in self._coeffs.values()), default=0.0)

    def normalized(self, rtol: float = NORMALIZE_RTOL, atol: float = 0.0) -> "PPoly":
        """Drop coefficients below ``rtol * max|coeff|`` (or ``atol``)."""
        cut = max(rtol * self.scale(), atol)
        return PPoly({q: v for q, v in self._coeffs.items() if abs(v) > cut})

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        out = np.zeros_like(p)
        for v in self.to_array()[::-1]:
            out = out * p + v
        return float(out) if out.ndim == 0 else out

    def to_array(self, length: int | None = None) -> np.ndarray:
        n = self.degree + 1 if length is None else length
        arr = np.zeros(max(n, 0))
        for q, v in self._coeffs.items():
            if q < n:
                arr[q] = v
        return arr

    def __add__(self, other):
        other = _as_ppoly(other)
        c = dict(self._coeffs)
        for q, v in other._coeffs.items():
            c[q] = c.get(q, 0.0) + v
        return PPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return PPoly({q: -v for q, v in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-_as_ppoly(other))

    def __mul__(self, other):
        other = _as_ppoly(other)
        c: dict[int, float] = {}
        for q1, v1 in self._coeffs.items():
            for q2, v2 in other._coeffs.items():
                c[q1 + q2] = c.get(q1 + q2, 0.0) + v1 * v2
        return PPoly(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, PPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __repr__(self):
        if not self._coeffs:
            return "PPoly(0)"
        terms = " + ".join(f"{v:.15g}*p^{q}" for q, v in self._coeffs.items())
        return f"PPoly({terms})"

    def even_part(self) -> "PPoly":
        return PPoly({q: v for q, v in self._coeffs.items() if q % 2 == 0})

    def odd_part(self) -> "PPoly":
        return PPoly({q: v for q, v in self._coeffs.items() if q % 2 == 1})


def _as_ppoly(x) -> PPoly:
    return x if isinstance(x, PPoly) else PPoly({0: float(x)})


def ppoly_interpolate(samples) -> PPoly:
    """Interpolating polynomial through ``(p, value)`` samples.

    Newton divided differences, then expansion of the Newton form into
    monomial coefficients. Raises ``ValueError`` on duplicate nodes.
    """
    pts = [(float(p), float(v)) for p, v in samples]
    if not pts:
        raise ValueError("need at least one sample")
    x = np.array([p for p, _ in pts])
    if len(np.unique(x)) != len(x):
        raise ValueError("duplicate interpolation nodes")
    coef = np.array([v for _, v in pts])
    n = len(x)
    for j in range(1, n):
        coef[j:] = (coef[j:] - coef[j - 1 : -1]) / (x[j:] - x[: n - j])
    # expand sum_k coef[k] prod_{i<k} (p - x_i) by Horner in reverse
    poly = np.zeros(n)
    poly[0] = coef[n - 1]
    deg = 0
    for k in range(n - 2, -1, -1):
        shifted = np.zeros(n)
        shifted[1 : deg + 2] = poly[: deg + 1]
        poly = shifted - x[k] * poly
        poly[0] += coef[k]
        deg += 1
    return PPoly(poly)


@dataclass(frozen=True)
class PGradedTensor:
    """Tensor polynomial ``sum_q p**q * grades[q]``; ``grades`` is (G, *dims)."""

    grades: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grades, dtype=float)
        if g.ndim < 1 or g.shape[0] < 1:
            raise ValueError("need at least one grade")
        object.__setattr__(self, "grades", g)

    @classmethod
    def from_map(cls, grades: Mapping[int, np.ndarray]) -> "PGradedTensor":
        shapes = {np.shape(v) for v in grades.values()}
        if len(shapes) != 1:
            raise ValueError("all grades must share dims")
        (shape,) = shapes
        out = np.zeros((max(grades) + 1,) + shape)
        for q, v in grades.items():
            out[q] = v
        return cls(out)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.grades.shape[1:]

    @property
    def max_grade(self) -> int:
        return self.grades.shape[0] - 1

    def grade(self, q: int) -> np.ndarray:
        if 0 <= q <= self.max_grade:
            return self.grades[q]
        return np.zeros(self.dims)

    def nonzero_grades(self, atol: float = 0.0) -> list[int]:
        return [q for q in range(self.max_grade + 1) if np.abs(self.grades[q]).max() > atol]

    def evaluate(self, p: float) -> np.ndarray:
        out = np.zeros(self.dims)
        for g in self.grades[::-1]:
            out = out * p + g
        return out

    def to_ppoly(self) -> PPoly:
        if self.dims:
            raise ValueError("only rank-0 graded tensors convert to PPoly")
        return PPoly(self.grades)

    def contract(self, other: "PGradedTensor", pairs) -> "PGradedTensor":
        """Graded contraction: grade ``q`` collects ``grade i (x) grade q-i``."""
        ga = self.max_grade
        gb = other.max_grade
        out = None
        for i in range(ga + 1):
            for j in range(gb + 1):
                c = contract(DenseTensor(self.grades[i]), DenseTensor(other.grades[j]), pairs).array
                if out is None:
                    out = np.zeros((ga + gb + 1,) + c.shape)
                out[i + j] += c
        return PGradedTensor(out)
