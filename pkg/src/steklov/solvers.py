"""Expansion solvers for Dirichlet, Robin, and Neumann Laplace problems.

A solution is a finite combination constant + sum of weighted modes, with the
weights determined by the problem kind from the boundary coefficients:

    Dirichlet:  w_j = ghat_j            constant term gbar
    Robin(b):   w_j = ghat_j/(b+d_j)    constant term gbar/b
    Neumann:    w_j = ghat_j/d_j        constant term 0, requires gbar ~ 0

d_j is the eigenvalue in the rectangle convention D_nu s = d s on the
boundary, which is the convention under which boundary data equal to
(b + d_k) * s_k yields exactly u = s_k. The Dirichlet solve can subtract the
corner-interpolating bilinear a0 + a1 x + a2 y + a3 xy first (it is harmonic)
and carry it as an explicit lift, which improves convergence of the rest.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .boundary import (
    BoundaryFunction,
    SteklovCoefficients,
    corner_bilinear_reduction,
    integrate_boundary,
    steklov_coefficients,
)
from .geometry import Rectangle, Side
from .spectrum import Spectrum


class IncompatibleDataError(ValueError):
    """Neumann data with a boundary mean too large to be solvable."""

    def __init__(self, gbar: float, tol: float):
        self.gbar = gbar
        self.tol = tol
        super().__init__(
            f"Neumann data must have zero boundary mean: |gbar| = {abs(gbar):.3g} "
            f"exceeds the tolerance {tol:.3g}"
        )


class BoundaryGradientWarning(UserWarning):
    """Gradient requested on the boundary, where it is one-sided."""


DIRICHLET = "dirichlet"
ROBIN = "robin"
NEUMANN = "neumann"


@dataclass(frozen=True)
class ProblemKind:
    name: str  # 'dirichlet' | 'robin' | 'neumann'
    b: float = 0.0

    def __post_init__(self):
        if self.name not in (DIRICHLET, ROBIN, NEUMANN):
            raise ValueError(f"unknown problem kind {self.name!r}")
        if self.name == ROBIN and not self.b > 0.0:
            raise ValueError(f"Robin problems need b > 0, got b = {self.b}")
        if self.name != ROBIN and self.b != 0.0:
            raise ValueError(f"{self.name} does not take a Robin constant")

    @classmethod
    def dirichlet(cls) -> "ProblemKind":
        return cls(DIRICHLET)

    @classmethod
    def robin(cls, b: float) -> "ProblemKind":
        return cls(ROBIN, float(b))

    @classmethod
    def neumann(cls) -> "ProblemKind":
        return cls(NEUMANN)


@dataclass(frozen=True)
class SteklovApproximation:
    """Evaluable truncated expansion solution on the closed rectangle."""

    kind: ProblemKind
    spectrum: Spectrum
    coefficients: SteklovCoefficients
    weights: tuple[float, ...]  # aligned with spectrum.nonconstant
    constant_term: float
    lift: Optional[tuple[float, float, float, float]] = None  # bilinear a0..a3

    @property
    def rect(self) -> Rectangle:
        return self.spectrum.rectangle

    def _lift_value(self, x, y):
        if self.lift is None:
            return 0.0
        a0, a1, a2, a3 = self.lift
        return a0 + a1 * x + a2 * y + a3 * x * y

    def eval(self, x: float, y: float) -> float:
        """Value at a point of the closed rectangle."""
        self.rect.require_inside(x, y)
        acc = self.constant_term + self._lift_value(x, y)
        for w, mode in zip(self.weights, self.spectrum.nonconstant):
            acc += w * mode._value_unchecked(x, y)
        return acc

    def eval_gradient(self, x: float, y: float) -> tuple[float, float]:
        """Term-by-term gradient; one-sided (and flagged) on the boundary."""
        self.rect.require_inside(x, y)
        if abs(x) == 1.0 or abs(y) == self.rect.h:
            warnings.warn(
                "gradient evaluated on the boundary is only one-sided",
                BoundaryGradientWarning,
                stacklevel=2,
            )
        gx = gy = 0.0
        if self.lift is not None:
            a0, a1, a2, a3 = self.lift
            gx += a1 + a3 * y
            gy += a2 + a3 * x
        for w, mode in zip(self.weights, self.spectrum.nonconstant):
            mx, my = mode._gradient_unchecked(x, y)
            gx += w * mx
            gy += w * my
        return gx, gy

    def eval_grid(self, nx: int, ny: int) -> np.ndarray:
        """Values on the closed tensor grid, shape (ny, nx), x varying fastest."""
        if nx < 2 or ny < 2:
            raise ValueError("grids need at least 2 points per axis")
        xs = np.linspace(-1.0, 1.0, nx)
        ys = np.linspace(-self.rect.h, self.rect.h, ny)
        X, Y = np.meshgrid(xs, ys)
        U = np.full(X.shape, self.constant_term, dtype=float)
        if self.lift is not None:
            a0, a1, a2, a3 = self.lift
            U += a0 + a1 * X + a2 * Y + a3 * X * Y
        for w, mode in zip(self.weights, self.spectrum.nonconstant):
            U += w * mode.value_array(X, Y)
        return U

    def eval_array(self, x, y) -> np.ndarray:
        """Vectorized values at arbitrary points of the closed rectangle."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        U = np.full(np.broadcast(x, y).shape, self.constant_term, dtype=float)
        if self.lift is not None:
            a0, a1, a2, a3 = self.lift
            U += a0 + a1 * x + a2 * y + a3 * x * y
        for w, mode in zip(self.weights, self.spectrum.nonconstant):
            U += w * mode.value_array(x, y)
        return U

    def gradient_arrays(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        shape = np.broadcast(x, y).shape
        gx = np.zeros(shape)
        gy = np.zeros(shape)
        if self.lift is not None:
            a0, a1, a2, a3 = self.lift
            gx += a1 + a3 * y
            gy += a2 + a3 * x
        for w, mode in zip(self.weights, self.spectrum.nonconstant):
            mx, my = mode.gradient_arrays(x, y)
            gx += w * mx
            gy += w * my
        return gx, gy

    def boundary_value(self, side: Side, t: float) -> float:
        """Trace of the approximation at a boundary point."""
        x, y = self.rect.side_point(side, t)
        acc = self.constant_term + self._lift_value(x, y)
        for w, mode in zip(self.weights, self.spectrum.nonconstant):
            acc += w * mode._value_unchecked(x, y)
        return acc

    def boundary_normal_derivative(self, side: Side, t: float) -> float:
        acc = 0.0
        if self.lift is not None:
            a0, a1, a2, a3 = self.lift
            x, y = self.rect.side_point(side, t)
            nx, ny = self.rect.outward_normal(side)
            acc += (a1 + a3 * y) * nx + (a2 + a3 * x) * ny
        for w, mode in zip(self.weights, self.spectrum.nonconstant):
            acc += w * mode.normal_derivative_on(side, t)
        return acc

    def restrict(self, sub: Spectrum) -> "SteklovApproximation":
        """The same solve truncated to a nested sub-spectrum."""
        coeffs = self.coefficients.restrict(sub)
        weights = _weights_for(self.kind, coeffs)
        return SteklovApproximation(
            self.kind, sub, coeffs, weights, self.constant_term, self.lift
        )


def _weights_for(kind: ProblemKind, coeffs: SteklovCoefficients) -> tuple[float, ...]:
    modes = coeffs.spectrum.nonconstant
    if kind.name == DIRICHLET:
        return tuple(coeffs.values)
    if kind.name == ROBIN:
        return tuple(g / (kind.b + md.delta) for g, md in zip(coeffs.values, modes))
    return tuple(g / md.delta for g, md in zip(coeffs.values, modes))


def solve_dirichlet(
    g: BoundaryFunction,
    spec: Spectrum,
    use_corner_reduction: bool = False,
    coefficients: Optional[SteklovCoefficients] = None,
    abstol: float = 1e-10,
    reltol: float = 1e-6,
    threads: int = 1,
) -> SteklovApproximation:
    """Harmonic extension of g, truncated to the given spectrum."""
    lift = None
    if use_corner_reduction:
        a0, a1, a2, a3, g = corner_bilinear_reduction(g, spec.rectangle)
        lift = (a0, a1, a2, a3)
        coefficients = None  # coefficients of the reduced data are required
    if coefficients is None:
        coefficients = steklov_coefficients(g, spec, abstol, reltol, threads=threads)
    kind = ProblemKind.dirichlet()
    return SteklovApproximation(
        kind, spec, coefficients, _weights_for(kind, coefficients), coefficients.gbar, lift
    )


def solve_robin(
    g: BoundaryFunction,
    b: float,
    spec: Spectrum,
    coefficients: Optional[SteklovCoefficients] = None,
    abstol: float = 1e-10,
    reltol: float = 1e-6,
    threads: int = 1,
) -> SteklovApproximation:
    """Galerkin solution of D_nu u + b u = g over the spectrum's modes."""
    kind = ProblemKind.robin(b)
    if coefficients is None:
        coefficients = steklov_coefficients(g, spec, abstol, reltol, threads=threads)
    return SteklovApproximation(
        kind, spec, coefficients, _weights_for(kind, coefficients), coefficients.gbar / b
    )


def neumann_mean_tolerance(g: BoundaryFunction, reltol: float = 1e-8) -> float:
    """Default compatibility tolerance: reltol times the boundary L2 norm of g."""
    sq, _ = integrate_boundary(
        BoundaryFunction(g.rect, {s: (lambda x, y, fn=fn: fn(x, y) ** 2) for s, fn in g.side_maps.items()})
    )
    return reltol * math.sqrt(max(sq, 0.0) / g.rect.perimeter)


def solve_neumann(
    g: BoundaryFunction,
    spec: Spectrum,
    mean_tol: Optional[float] = None,
    coefficients: Optional[SteklovCoefficients] = None,
    abstol: float = 1e-10,
    reltol: float = 1e-6,
    threads: int = 1,
) -> SteklovApproximation:
    """Minimum-norm solution of D_nu u = g; data must have zero boundary mean."""
    kind = ProblemKind.neumann()
    if coefficients is None:
        coefficients = steklov_coefficients(g, spec, abstol, reltol, threads=threads)
    if mean_tol is None:
        mean_tol = neumann_mean_tolerance(g)
    if abs(coefficients.gbar) > mean_tol:
        raise IncompatibleDataError(coefficients.gbar, mean_tol)
    return SteklovApproximation(
        kind, spec, coefficients, _weights_for(kind, coefficients), 0.0
    )


def solve(
    kind: ProblemKind,
    g: BoundaryFunction,
    spec: Spectrum,
    **kwargs,
) -> SteklovApproximation:
    """Dispatch on the problem kind."""
    if kind.name == DIRICHLET:
        return solve_dirichlet(g, spec, **kwargs)
    if kind.name == ROBIN:
        return solve_robin(g, kind.b, spec, **kwargs)
    return solve_neumann(g, spec, **kwargs)


def grid_points(rect: Rectangle, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
    """The tensor grid underlying eval_grid, as meshgrid arrays (ny, nx)."""
    xs = np.linspace(-1.0, 1.0, nx)
    ys = np.linspace(-rect.h, rect.h, ny)
    return np.meshgrid(xs, ys)
