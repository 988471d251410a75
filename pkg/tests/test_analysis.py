"""Error norms, bounds, convergence reports, and the invariant suite."""

import math
from dataclasses import replace

import numpy as np
import pytest

from steklov import (
    BoundaryFunction,
    ErrorReport,
    ProblemKind,
    Rectangle,
    Side,
    SIDES,
    TolProfile,
    boundary_error,
    boundary_l2,
    boundary_partial_sum,
    boundary_sup,
    builtin_boundary,
    coefficient_tail,
    convergence_study,
    dnorm_sq,
    exact_solution_for,
    grid_points,
    interior_l2,
    invariant_suite,
    monotone_boundary_trend,
    neumann_bound,
    pointwise_table,
    robin_bound,
    robin_dnorm_tail_sq,
    solve_dirichlet,
    solve_neumann,
    solve_robin,
    spectral_tail,
    steklov_coefficients,
)
from steklov.analysis import REPORT_FIELDS, reports_to_csv_rows
from steklov.spectrum import GLOBAL_SORTED, Spectrum


@pytest.fixture(scope="module")
def rect():
    return Rectangle(1.0)


def prefix(deep, count):
    return Spectrum(deep.rectangle, deep.modes[: count + 1], GLOBAL_SORTED, count)


def test_boundary_error_of_exact_partial_sum(rect, spec_pf5):
    g = builtin_boundary("f2", rect)
    co = steklov_coefficients(g, spec_pf5)
    gm_fun = BoundaryFunction.from_xy(
        lambda x, y: co.gbar
        + sum(v * md._value_unchecked(x, y) for v, md in zip(co.values, spec_pf5.nonconstant)),
        rect,
    )
    l2, sup = boundary_error(gm_fun, lambda s, t: boundary_partial_sum(co, s, t))
    assert l2 <= 1e-9 and sup <= 1e-9


def test_boundary_error_requires_enough_samples(rect):
    g = builtin_boundary("f1", rect)
    with pytest.raises(ValueError):
        boundary_error(g, lambda s, t: 0.0, samples_per_side=4)


def test_rerr_matches_published_value(rect, deep_square):
    # rerr_inf of f1 at M=2 on the square, against the printed 6.59553e-3
    g = builtin_boundary("f1", rect)
    co = steklov_coefficients(g, deep_square)
    cox = co.restrict(prefix(deep_square, 15))
    l2, sup = boundary_error(g, lambda s, t: boundary_partial_sum(cox, s, t))
    gsup = boundary_sup(lambda s, t: g.value(s, t), rect, include_corners=False)
    assert sup / gsup == pytest.approx(6.59553e-3, rel=0.05)
    gl2 = boundary_l2(lambda s, t: g.value(s, t), rect)
    assert l2 / gl2 == pytest.approx(5.22051e-3, rel=0.01)


def test_pointwise_table_values(rect, deep_square):
    g = builtin_boundary("f1", rect)
    exact = exact_solution_for("f1")
    co = steklov_coefficients(g, deep_square)
    sub = prefix(deep_square, 23)
    u = solve_dirichlet(g, sub, coefficients=co.restrict(sub))
    rows = pointwise_table(exact.value, u, [(0.9, 0.1)])
    (_, approx, exact_val, err) = rows[0]
    assert approx == pytest.approx(0.607979, abs=1e-4)
    assert err == pytest.approx(0.000379, abs=1e-4)
    assert exact_val == pytest.approx(0.6076, abs=1e-12)
    ident = pointwise_table(lambda x, y: u.eval(x, y), u, [(0.2, 0.2)])
    assert ident[0][3] == 0.0


def test_rerr_scale_invariance(rect, deep_square):
    g = builtin_boundary("f3", rect)
    g10 = g.scale(10.0)
    sub = prefix(deep_square, 15)
    out = []
    for data in (g, g10):
        co = steklov_coefficients(data, sub)
        diff = lambda s, t: data.value(s, t) - boundary_partial_sum(co, s, t)
        base = lambda s, t: data.value(s, t)
        out.append(
            (
                boundary_sup(diff, rect, 400) / boundary_sup(base, rect, 400),
                boundary_l2(diff, rect) / boundary_l2(base, rect),
            )
        )
    assert out[0][0] == pytest.approx(out[1][0], rel=1e-10)
    assert out[0][1] == pytest.approx(out[1][1], rel=1e-10)


def test_spectral_pythagoras_all_catalog_data(rect, deep_square):
    for name in ("f1", "f2", "f3", "bd1", "bd2", "bd3"):
        g = builtin_boundary(name, rect, 1.0 if name == "bd3" else None)
        co = steklov_coefficients(g, deep_square)
        cox = co.restrict(prefix(deep_square, 23))
        gsq = boundary_l2(lambda s, t: g.value(s, t), rect) ** 2
        errsq = boundary_l2(
            lambda s, t: g.value(s, t) - boundary_partial_sum(cox, s, t), rect
        ) ** 2
        assert errsq == pytest.approx(gsq - cox.weighted_norm_sq, rel=1e-6, abs=1e-12)


def test_h1_tail_identity(rect, deeper_square):
    # gradient error energy equals perimeter times the spectral tail, within 1%
    g = builtin_boundary("f1", rect)
    exact = exact_solution_for("f1")
    co = steklov_coefficients(g, deeper_square)
    for count in (15, 23):
        sub = prefix(deeper_square, count)
        u = solve_dirichlet(g, sub, coefficients=co.restrict(sub))

        def grad_err(X, Y):
            gx, gy = u.gradient_arrays(X, Y)
            ex = np.vectorize(lambda a, b: exact.gradient(a, b)[0])(X, Y)
            ey = np.vectorize(lambda a, b: exact.gradient(a, b)[1])(X, Y)
            return np.sqrt((gx - ex) ** 2 + (gy - ey) ** 2)

        quad_val = interior_l2(grad_err, rect) ** 2
        tail = rect.perimeter * spectral_tail(co, count)
        assert quad_val == pytest.approx(tail, rel=0.01)


def test_dnorm_of_normalized_mode(rect, spec_pf5):
    # the weighted graph norm of a mode is 1 + delta
    from steklov.solvers import SteklovApproximation
    from steklov.boundary import SteklovCoefficients

    for md in (spec_pf5.nonconstant[2], spec_pf5.nonconstant[11]):
        co = SteklovCoefficients(spec_pf5, 0.0, tuple(
            1.0 if m.key == md.key else 0.0 for m in spec_pf5.nonconstant
        ), (0.0,) * (len(spec_pf5.nonconstant) + 1))
        u = SteklovApproximation(ProblemKind.dirichlet(), spec_pf5, co, co.values, 0.0)
        assert dnorm_sq(u) == pytest.approx(1.0 + md.delta, rel=1e-6)


def test_robin_bound_zero_tail(rect, spec_pf5):
    md = spec_pf5.nonconstant[0]
    g = BoundaryFunction.from_xy(lambda x, y: 2.0 * md._value_unchecked(x, y), rect)
    co = steklov_coefficients(g, spec_pf5)
    m = len(spec_pf5.nonconstant)
    assert coefficient_tail(co, 5) <= 1e-12
    assert robin_bound(co, 1.0, 5) <= 1e-11
    with pytest.raises(ValueError):
        robin_bound(co, 1.0, m)  # no delta_{m+1} available


def test_robin_bound_monotone_and_dominates(rect, deep_square):
    b = 1.0
    g = builtin_boundary("bd3", rect, b)
    co = steklov_coefficients(g, deep_square)
    bounds = [robin_bound(co, b, m) for m in range(1, 11)]
    assert all(y <= x * (1 + 1e-12) for x, y in zip(bounds, bounds[1:]))
    for m in range(1, 11):
        measured = robin_dnorm_tail_sq(co, b, m)
        assert measured <= bounds[m - 1] * (1 + 1e-12)
    # dual route at one depth: quadrature graph norm of (deep - truncated)
    m = 5
    u_deep = solve_robin(g, b, deep_square, coefficients=co)
    u_m = u_deep.restrict(prefix(deep_square, m))
    diff_weights = tuple(
        wd - (u_m.weights[i] if i < m else 0.0) for i, wd in enumerate(u_deep.weights)
    )
    from steklov.solvers import SteklovApproximation

    diff = SteklovApproximation(
        ProblemKind.robin(b), deep_square, co, diff_weights, 0.0
    )
    measured_quad = dnorm_sq(diff)
    assert measured_quad <= robin_bound(co, b, m) * (1 + 1e-6)
    assert measured_quad == pytest.approx(robin_dnorm_tail_sq(co, b, m), rel=1e-6)


def test_neumann_bound_is_b_zero_form(rect, deep_square):
    g = builtin_boundary("bd1", rect)
    co = steklov_coefficients(g, deep_square)
    assert neumann_bound(co, 4) == pytest.approx(robin_bound(co, 0.0, 4), rel=1e-15)


def test_invariant_suite_passes(spec_pf5):
    report = invariant_suite(spec_pf5, TolProfile(), seed=0)
    assert report.passed, "\n".join(c.line() for c in report.checks)
    names = {c.name for c in report.checks}
    assert {"boundary-orthonormality", "steklov-residual", "interior-harmonicity",
            "delta-monotone-per-family", "dilation-scaling"} <= names


def test_invariant_suite_seed_determinism(spec_pf5):
    a = invariant_suite(spec_pf5, seed=7)
    b = invariant_suite(spec_pf5, seed=8)
    assert a.passed == b.passed


def test_invariant_suite_detects_corrupted_norm(square):
    from steklov import build_spectrum

    spec = build_spectrum(square, 1)
    bad = spec.nonconstant[2]
    modes = list(spec.modes)
    modes[bad.index] = replace(bad, norm_scaled=bad.norm_scaled * 1.01)
    broken = Spectrum(square, tuple(modes), spec.selection, spec.depth)
    report = invariant_suite(broken, seed=0)
    assert not report.passed
    failing = {c.name for c in report.checks if not c.passed}
    assert "boundary-orthonormality" in failing


def test_single_constant_spectrum_passes(square):
    from steklov import build_spectrum_by_count

    spec = build_spectrum_by_count(square, 0)
    assert invariant_suite(spec, seed=0).passed


def test_convergence_study_matches_square_table(rect):
    g = builtin_boundary("f1", rect)
    reports = convergence_study(g, [2, 3, 5])
    want = (5.22051e-3, 1.57535e-3, 3.1167e-4)
    for rep, ref in zip(reports, want):
        assert rep.rerr_2 == pytest.approx(ref, rel=0.01)
    assert monotone_boundary_trend(reports)
    assert all(r.robin_bound is None for r in reports)


def test_convergence_study_with_exact_solution(rect):
    g = builtin_boundary("bd3", rect, 1.0)
    exact = exact_solution_for("bd3")
    reports = convergence_study(g, [2, 3], kind=ProblemKind.robin(1.0), exact=exact)
    assert reports[0].rerr_2 > reports[1].rerr_2
    assert reports[0].robin_bound is not None
    assert reports[0].err_sup_interior <= reports[0].err_sup_boundary + 1e-6


def test_convergence_study_rejects_unsorted(rect):
    g = builtin_boundary("f1", rect)
    with pytest.raises(ValueError):
        convergence_study(g, [3, 2])


def test_finite_expansion_converges_to_zero_error(rect, spec_pf5):
    co_data = steklov_coefficients(builtin_boundary("f2", rect), spec_pf5.select(2))
    gm = BoundaryFunction.from_xy(
        lambda x, y: co_data.gbar
        + sum(v * md._value_unchecked(x, y)
              for v, md in zip(co_data.values, spec_pf5.select(2).nonconstant)),
        rect,
    )
    reports = convergence_study(gm, [2, 3])
    assert reports[1].err_L2_boundary <= 1e-8


def test_interior_beats_boundary_for_experiments(rect, deep_square):
    # at the deepest published truncation the midregion error is far smaller
    for name, kind, count in (("bd1", "n", 40), ("bd2", "n", 40), ("bd3", "r", 39)):
        g = builtin_boundary(name, rect, 1.0 if name == "bd3" else None)
        exact = exact_solution_for(name)
        co = steklov_coefficients(g, deep_square)
        sub = prefix(deep_square, count)
        cox = co.restrict(sub)
        u = (solve_neumann(g, sub, coefficients=cox) if kind == "n"
             else solve_robin(g, 1.0, sub, coefficients=cox))
        X, Y = grid_points(rect, 101, 101)
        E = np.abs(np.vectorize(exact.value)(X, Y) - u.eval_array(X, Y))
        center = (np.abs(X) <= 0.5) & (np.abs(Y) <= 0.5)
        assert E[center].max() < E.max()


def test_report_serialization_fields():
    rep = ErrorReport(2, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, None)
    d = rep.to_dict()
    assert tuple(d) == REPORT_FIELDS
    rows = list(reports_to_csv_rows([rep]))
    assert rows[0] == list(REPORT_FIELDS)
    assert rows[1][-1] == ""  # absent bound serializes empty
