"""Error norms, convergence reports, theoretical bounds, and invariant checks.

Norm conventions used throughout:

* boundary L2 norms carry the 1/perimeter weight, matching the inner product
  that makes the normalized eigenfunctions orthonormal;
* boundary sup norms are sampled on dense per-side grids (they are reported
  as sampled sups, not exact suprema);
* interior L2 norms are plain integrals over the rectangle via tensor
  Gauss-Legendre quadrature;
* the graph norm reported by `dnorm_sq` is (1/perimeter) * (integral of
  |grad u|^2 + boundary integral of u^2), under which a normalized mode has
  squared norm exactly 1 + delta;
* rerr_inf and rerr_2 are ratios of boundary error norms to the data (or
  exact-solution) norms, so they are weight and scale invariant.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .boundary import (
    BoundaryFunction,
    SteklovCoefficients,
    boundary_partial_sum,
    integrate_boundary,
    steklov_coefficients,
)
from .geometry import Rectangle, Side, SIDES
from .solvers import (
    NEUMANN,
    ProblemKind,
    SteklovApproximation,
    grid_points,
    solve,
)
from .spectrum import (
    FamilyTag,
    PER_FAMILY,
    Spectrum,
    build_spectrum,
    scale_mode,
)


class NormKind(enum.Enum):
    BOUNDARY_L2_WEIGHTED = "boundary-l2-weighted"
    BOUNDARY_L2_RAW = "boundary-l2-raw"
    BOUNDARY_SUP_SAMPLED = "boundary-sup-sampled"
    INTERIOR_L2_GRID = "interior-l2-grid"
    INTERIOR_SUP_GRID = "interior-sup-grid"
    GRAPH_NORM = "graph-norm"
    SPECTRAL_HALF_SEMINORM = "spectral-half-seminorm"


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def boundary_l2(fn: Callable[[Side, float], float], rect: Rectangle,
                abstol: float = 1e-12, reltol: float = 1e-9) -> float:
    """Weighted boundary L2 norm of a (side, t) map, by adaptive quadrature."""
    from scipy.integrate import quad

    total = 0.0
    for side in SIDES:
        lo, hi = rect.side_interval(side)
        v, _ = quad(lambda t: fn(side, t) ** 2, lo, hi, epsabs=abstol, epsrel=reltol, limit=250)
        total += v
    return math.sqrt(max(total, 0.0) / rect.perimeter)


def boundary_sup(fn: Callable[[Side, float], float], rect: Rectangle,
                 samples_per_side: int = 1000, include_corners: bool = True) -> float:
    """Sampled boundary sup of a (side, t) map."""
    worst = 0.0
    for side in SIDES:
        lo, hi = rect.side_interval(side)
        step = (hi - lo) / samples_per_side
        if include_corners:
            ts = (lo + i * step for i in range(samples_per_side + 1))
        else:
            ts = (lo + (i + 0.5) * step for i in range(samples_per_side))
        for t in ts:
            worst = max(worst, abs(fn(side, t)))
    return worst


def interior_l2(fn_on_grid: Callable[[np.ndarray, np.ndarray], np.ndarray],
                rect: Rectangle, n: int = 64) -> float:
    """Plain L2(Omega) norm via n x n tensor Gauss-Legendre quadrature."""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    xs = nodes
    ys = rect.h * nodes
    X, Y = np.meshgrid(xs, ys)
    W = rect.h * np.outer(weights, weights)
    vals = fn_on_grid(X, Y)
    return math.sqrt(float((W * vals * vals).sum()))


def interior_sup(fn_on_grid, rect: Rectangle, nx: int = 101, ny: int = 101) -> float:
    X, Y = grid_points(rect, nx, ny)
    return float(np.abs(fn_on_grid(X, Y)).max())


def boundary_error(
    g: BoundaryFunction,
    gm: Callable[[Side, float], float],
    samples_per_side: int = 1000,
    abstol: float = 1e-12,
    reltol: float = 1e-9,
) -> tuple[float, float]:
    """(weighted L2, sampled sup) of g minus a boundary evaluator.

    The sup is sampled half a step away from corners so that two-sided corner
    values of discontinuous data never enter.
    """
    if samples_per_side < 16:
        raise ValueError("need at least 16 samples per side")
    rect = g.rect
    diff = lambda side, t: g.value(side, t) - gm(side, t)
    l2 = boundary_l2(diff, rect, abstol, reltol)
    sup = boundary_sup(diff, rect, samples_per_side, include_corners=False)
    return l2, sup


def dnorm_sq(approx: SteklovApproximation, n_gauss: int = 64) -> float:
    """Quadrature value of the weighted graph norm squared of an expansion."""
    rect = approx.rect

    def grad_sq(X, Y):
        gx, gy = approx.gradient_arrays(X, Y)
        return np.sqrt(gx * gx + gy * gy)

    grad_part = interior_l2(grad_sq, rect, n_gauss) ** 2
    trace_part = boundary_l2(approx.boundary_value, rect) ** 2 * rect.perimeter
    return (grad_part + trace_part) / rect.perimeter


# ---------------------------------------------------------------------------
# spectral quantities and bounds
# ---------------------------------------------------------------------------


def spectral_tail(coeffs: SteklovCoefficients, m: int) -> float:
    """sum of delta_j ghat_j^2 over modes beyond the first m nonconstant ones.

    The raw Dirichlet gradient-error integral equals perimeter times this
    value, by the boundary normalization of the modes.
    """
    modes = coeffs.spectrum.nonconstant
    return sum(md.delta * v * v for md, v in zip(modes[m:], coeffs.values[m:]))


def coefficient_tail(coeffs: SteklovCoefficients, m: int) -> float:
    """sum of ghat_j^2 beyond the first m nonconstant modes."""
    return sum(v * v for v in coeffs.values[m:])


def robin_bound(coeffs: SteklovCoefficients, b: float, m: int) -> float:
    """Graph-norm error bound for the m-term Robin solve.

    (1 + d_{m+1}) / (b + d_{m+1})^2 times the spectral tail of the data,
    where d_{m+1} is the first omitted eigenvalue of the (delta-ordered)
    spectrum. The same eigenvalue convention as the solver denominators.
    """
    modes = coeffs.spectrum.nonconstant
    if m >= len(modes):
        raise ValueError(
            f"spectrum holds {len(modes)} nonconstant modes; need at least {m + 1}"
        )
    d_next = modes[m].delta
    return (1.0 + d_next) / (b + d_next) ** 2 * coefficient_tail(coeffs, m)


def neumann_bound(coeffs: SteklovCoefficients, m: int) -> float:
    """The b = 0 form of robin_bound.

    The published statement of this bound is ambiguous about a leftover b in
    the denominator; this evaluates it at b = 0, which is the natural
    Neumann reading.
    """
    return robin_bound(coeffs, 0.0, m)


def robin_dnorm_tail_sq(coeffs: SteklovCoefficients, b: float, m: int) -> float:
    """Spectral graph-norm gap between the m-term Robin solve and the deepest
    one available in coeffs: sum of (ghat/(b+d))^2 (1+d) over omitted modes."""
    modes = coeffs.spectrum.nonconstant
    return sum(
        (v / (b + md.delta)) ** 2 * (1.0 + md.delta)
        for md, v in zip(modes[m:], coeffs.values[m:])
    )


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

REPORT_FIELDS = (
    "M",
    "rerr_inf",
    "rerr_2",
    "err_L2_boundary",
    "err_sup_boundary",
    "err_L2_interior",
    "err_sup_interior",
    "spectral_tail",
    "robin_bound",
)


@dataclass(frozen=True)
class ErrorReport:
    M: int
    rerr_inf: float
    rerr_2: float
    err_L2_boundary: float
    err_sup_boundary: float
    err_L2_interior: float
    err_sup_interior: float
    spectral_tail: float
    robin_bound: Optional[float] = None

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_FIELDS}


def reports_to_json(reports: Sequence[ErrorReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def reports_to_csv_rows(reports: Sequence[ErrorReport]):
    yield list(REPORT_FIELDS)
    for r in reports:
        row = []
        for name in REPORT_FIELDS:
            v = getattr(r, name)
            row.append("" if v is None else v)
        yield row


def pointwise_table(
    exact: Callable[[float, float], float],
    approx: SteklovApproximation,
    points: Sequence[tuple[float, float]],
):
    """Per point: approximate value, exact value, absolute error."""
    rows = []
    for x, y in points:
        a = approx.eval(x, y)
        e = exact(x, y)
        rows.append(((x, y), a, e, abs(a - e)))
    return rows


def convergence_study(
    g: BoundaryFunction,
    m_values: Sequence[int],
    kind: ProblemKind = ProblemKind.dirichlet(),
    selection: str = PER_FAMILY,
    exact=None,
    abstol: float = 1e-10,
    reltol: float = 1e-6,
    grid: tuple[int, int] = (101, 101),
    reference_m: Optional[int] = None,
) -> list[ErrorReport]:
    """One ErrorReport per truncation depth, sharing a single coefficient set.

    With an exact solution the errors are against it. Otherwise the deepest
    expansion built here is the surrogate truth; pass reference_m (40 is a
    safe default for smooth data) to make that reference deeper than
    max(m_values). For Dirichlet runs the boundary error is that of the data
    partial sum; for flux problems without a closed form it is measured
    against the surrogate's trace.

    The bound column is the Robin graph-norm bound; for Neumann runs it is
    the same expression at b = 0, whose published statement is ambiguous
    about a leftover b (the b = 0 reading is used here).
    """
    if list(m_values) != sorted(m_values):
        raise ValueError("m_values must be increasing")
    rect = g.rect
    depth = max(m_values) if reference_m is None else max(reference_m, max(m_values))
    deep = build_spectrum(rect, depth, selection)
    coeffs = steklov_coefficients(g, deep, abstol, reltol)
    u_deep = solve(kind, g, deep, coefficients=coeffs)

    if exact is not None:
        ref_boundary = lambda side, t: exact.value(*rect.side_point(side, t))
        ref_interior = np.vectorize(exact.value)
    elif kind.name == "dirichlet":
        ref_boundary = lambda side, t: g.value(side, t)
        ref_interior = u_deep.eval_array
    else:
        ref_boundary = u_deep.boundary_value
        ref_interior = u_deep.eval_array

    ref_sup = boundary_sup(ref_boundary, rect)
    ref_l2 = boundary_l2(ref_boundary, rect)

    reports = []
    for m in m_values:
        sub = deep.select(m)
        u = u_deep.restrict(sub)
        if exact is None and kind.name == "dirichlet":
            cox = coeffs.restrict(sub)
            diff = lambda side, t: g.value(side, t) - boundary_partial_sum(cox, side, t)
        else:
            diff = lambda side, t: ref_boundary(side, t) - u.boundary_value(side, t)
        el2 = boundary_l2(diff, rect)
        esup = boundary_sup(diff, rect)
        int_diff = lambda X, Y: ref_interior(X, Y) - u.eval_array(X, Y)
        ei2 = interior_l2(int_diff, rect)
        eisup = interior_sup(int_diff, rect, *grid)
        n_kept = len(sub.nonconstant)
        bound = None
        if n_kept < len(deep.nonconstant):
            if kind.name == "robin":
                bound = robin_bound(coeffs, kind.b, n_kept)
            elif kind.name == NEUMANN:
                bound = neumann_bound(coeffs, n_kept)
        reports.append(
            ErrorReport(
                M=m,
                rerr_inf=esup / ref_sup if ref_sup > 0 else float("nan"),
                rerr_2=el2 / ref_l2 if ref_l2 > 0 else float("nan"),
                err_L2_boundary=el2,
                err_sup_boundary=esup,
                err_L2_interior=ei2,
                err_sup_interior=eisup,
                spectral_tail=spectral_tail(coeffs, n_kept),
                robin_bound=bound,
            )
        )
    return reports


def monotone_boundary_trend(reports: Sequence[ErrorReport]) -> bool:
    errs = [r.err_L2_boundary for r in reports]
    return all(b <= a * (1.0 + 1e-12) for a, b in zip(errs, errs[1:]))


# ---------------------------------------------------------------------------
# invariant suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TolProfile:
    orthonormality: float = 1e-8
    steklov_residual: float = 1e-8
    harmonicity_order: float = 1.8
    harmonicity_floor: float = 1e-7
    scaling: float = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        mark = "pass" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: worst {self.worst:.3e} (tol {self.tol:.3e}) {self.detail}"


@dataclass(frozen=True)
class SuiteReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(
            {
                "passed": self.passed,
                "checks": [
                    {
                        "name": c.name,
                        "passed": c.passed,
                        "worst": c.worst,
                        "tol": c.tol,
                        "detail": c.detail,
                    }
                    for c in self.checks
                ],
            },
            indent=2,
        )


def _random_boundary_points(rect: Rectangle, rng: random.Random, n: int):
    pts = []
    for _ in range(n):
        side = rng.choice(SIDES)
        lo, hi = rect.side_interval(side)
        # keep strictly inside the side so corners never enter
        t = lo + (hi - lo) * (0.001 + 0.998 * rng.random())
        pts.append((side, t))
    return pts


def check_orthonormality(spec: Spectrum, tol: float, abstol=1e-11, reltol=1e-8) -> CheckResult:
    rect = spec.rectangle
    worst = 0.0
    worst_pair = ""
    n = len(spec.modes)
    for i in range(n):
        for j in range(i, n):
            mi, mj = spec.modes[i], spec.modes[j]
            prod = BoundaryFunction.from_xy(
                lambda x, y, a=mi, b=mj: a._value_unchecked(x, y) * b._value_unchecked(x, y),
                rect,
            )
            val, _ = integrate_boundary(prod, abstol, reltol)
            dev = abs(val / rect.perimeter - (1.0 if i == j else 0.0))
            if dev > worst:
                worst, worst_pair = dev, f"({mi.family.value}#{mi.family_rank}, {mj.family.value}#{mj.family_rank})"
    return CheckResult("boundary-orthonormality", worst <= tol, worst, tol, worst_pair)


def check_steklov_residual(spec: Spectrum, tol: float, rng: random.Random, n_points=100) -> CheckResult:
    rect = spec.rectangle
    worst = 0.0
    for mode in spec.modes:
        pts = _random_boundary_points(rect, rng, n_points)
        peak = max(abs(mode.trace(s, t)) for s, t in pts)
        scale = (1.0 + mode.delta) * max(peak, 1.0)
        for s, t in pts:
            resid = abs(mode.normal_derivative_on(s, t) - mode.delta * mode.trace(s, t))
            worst = max(worst, resid / scale)
    return CheckResult("steklov-residual", worst <= tol, worst, tol)


def check_harmonicity(spec: Spectrum, min_order: float, floor: float, rng: random.Random) -> CheckResult:
    """Five-point Laplacian shrinks at second order (the modes are harmonic)."""
    rect = spec.rectangle
    worst_order = math.inf
    detail = ""
    for mode in spec.modes:
        if mode.family is FamilyTag.CONST:
            continue
        x = rng.uniform(-0.6, 0.6)
        y = rng.uniform(-0.6 * rect.h, 0.6 * rect.h)
        scale = max(abs(mode._value_unchecked(x, y)), 1.0) * (1.0 + mode.nu) ** 2

        def lap(w):
            return (
                mode._value_unchecked(x + w, y)
                + mode._value_unchecked(x - w, y)
                + mode._value_unchecked(x, y + w)
                + mode._value_unchecked(x, y - w)
                - 4.0 * mode._value_unchecked(x, y)
            ) / (w * w)

        w = min(0.02, 0.5 / max(mode.nu, 1.0))
        l1, l2 = abs(lap(w)), abs(lap(0.5 * w))
        if l2 <= floor * scale:
            continue  # already at rounding level
        order = math.log2(l1 / l2) if l1 > 0 else math.inf
        if order < worst_order:
            worst_order = order
            detail = f"{mode.family.value}#{mode.family_rank} at ({x:.3f},{y:.3f})"
    if worst_order is math.inf:
        return CheckResult("interior-harmonicity", True, float("inf"), min_order, "all at rounding level")
    return CheckResult("interior-harmonicity", worst_order >= min_order, worst_order, min_order, detail)


def check_delta_monotone(spec: Spectrum) -> CheckResult:
    by_family: dict = {}
    for mode in spec.nonconstant:
        by_family.setdefault(mode.family, []).append(mode)
    ok = True
    worst = 0.0
    for fam, modes in by_family.items():
        modes.sort(key=lambda m: m.family_rank)
        for a, b in zip(modes, modes[1:]):
            gap = b.delta - a.delta
            if gap <= 0 and fam.is_separable:
                ok = False
                worst = min(worst, gap)
    return CheckResult("delta-monotone-per-family", ok, worst, 0.0)


def check_scaling(spec: Spectrum, tol: float, rng: random.Random) -> CheckResult:
    worst = 0.0
    for mode in spec.modes[: min(len(spec.modes), 12)]:
        for L in (1.0, 2.0, 0.5, 3.7):
            d_scaled, ev = scale_mode(mode, L)
            worst = max(worst, abs(d_scaled - mode.delta / L))
            x = rng.uniform(-0.9, 0.9)
            y = rng.uniform(-0.9 * spec.rectangle.h, 0.9 * spec.rectangle.h)
            worst = max(worst, abs(ev(L * x, L * y) - mode._value_unchecked(x, y)))
    return CheckResult("dilation-scaling", worst <= tol, worst, tol)


def check_structure(spec: Spectrum) -> CheckResult:
    ok = spec.modes[0].family is FamilyTag.CONST
    deltas = [m.delta for m in spec.modes]
    ok = ok and deltas == sorted(deltas)
    if spec.rectangle.is_square and len(spec.modes) > 9:
        ok = ok and any(m.family is FamilyTag.XY for m in spec.modes)
    keys = [m.key for m in spec.modes]
    ok = ok and len(set(keys)) == len(keys)
    return CheckResult("spectrum-structure", ok, 0.0 if ok else 1.0, 0.0)


def invariant_suite(spec: Spectrum, tols: TolProfile = TolProfile(), seed: int = 0) -> SuiteReport:
    """Orthonormality, Steklov residual, harmonicity, monotonicity, scaling."""
    rng = random.Random(seed)
    checks = (
        check_structure(spec),
        check_orthonormality(spec, tols.orthonormality),
        check_steklov_residual(spec, tols.steklov_residual, rng),
        check_harmonicity(spec, tols.harmonicity_order, tols.harmonicity_floor, rng),
        check_delta_monotone(spec),
        check_scaling(spec, tols.scaling, rng),
    )
    return SuiteReport(checks)
