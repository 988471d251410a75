"""Mode evaluation, normalization, spectra, and the cache file."""

import math
import random
from dataclasses import replace

import numpy as np
import pytest

from steklov import (
    FamilyTag,
    GeometryError,
    GLOBAL_SORTED,
    PER_FAMILY,
    Rectangle,
    SIDES,
    SpectrumError,
    boundary_norm_constant,
    build_spectrum,
    build_spectrum_by_count,
    find_roots,
    make_mode,
    mode_normal_derivative,
    mode_value,
    scale_mode,
    spectrum_from_json,
    spectrum_to_json,
)


def gauss_boundary_matrix(spec, n=240):
    """Gram matrix of boundary traces by Gauss-Legendre quadrature (oracle)."""
    rect = spec.rectangle
    nodes, wts = np.polynomial.legendre.leggauss(n)
    G = np.zeros((len(spec.modes), len(spec.modes)))
    for side in SIDES:
        lo, hi = rect.side_interval(side)
        ts = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        ws = 0.5 * (hi - lo) * wts
        vals = np.array([[md.trace(side, t) for t in ts] for md in spec.modes])
        G += (vals * ws) @ vals.T
    return G / rect.perimeter


def test_constant_mode():
    rect = Rectangle(0.8)
    md = make_mode(FamilyTag.CONST, rect)
    assert mode_value(md, 0.3, -0.2) == 1.0
    assert md.delta == 0.0 and md.norm_const == 1.0
    assert mode_normal_derivative(md, 1.0, 0.1) == 0.0


def test_xy_mode_square_only():
    rect = Rectangle(1.0)
    md = make_mode(FamilyTag.XY, rect)
    assert md.delta == 1.0
    assert mode_value(md, 0.5, 0.5) == pytest.approx(math.sqrt(3.0) * 0.25, rel=1e-15)
    # outward derivative on the right side is sqrt(3)*y
    assert mode_normal_derivative(md, 1.0, 0.5) == pytest.approx(math.sqrt(3.0) * 0.5, rel=1e-15)
    with pytest.raises(SpectrumError):
        make_mode(FamilyTag.XY, Rectangle(0.5))


def test_norm_constants():
    rect = Rectangle(1.0)
    assert boundary_norm_constant(FamilyTag.CONST, 0.0, rect) == 1.0
    assert boundary_norm_constant(FamilyTag.XY, 0.0, rect) == pytest.approx(math.sqrt(3.0), rel=1e-15)


@pytest.mark.parametrize("family", [FamilyTag.F1, FamilyTag.F3, FamilyTag.F6, FamilyTag.F8])
@pytest.mark.parametrize("h", [1.0, 0.6])
def test_norm_constant_matches_quadrature(family, h):
    """Closed-form normalization against a Gauss-Legendre oracle of the trace square."""
    rect = Rectangle(h)
    nu = find_roots(family, rect, 3)[2]
    md = make_mode(family, rect, nu, 2)
    nodes, wts = np.polynomial.legendre.leggauss(400)
    total = 0.0
    for side in SIDES:
        lo, hi = rect.side_interval(side)
        ts = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        ws = 0.5 * (hi - lo) * wts
        total += sum(w * md.trace(side, t) ** 2 for t, w in zip(ts, ws))
    assert total == pytest.approx(rect.perimeter, rel=1e-9)


def test_mode_value_decay_ratio():
    rect = Rectangle(1.0)
    nu = find_roots(FamilyTag.F1, rect, 1)[0]
    md = make_mode(FamilyTag.F1, rect, nu, 0)
    ratio = md.value(0.0, 0.0) / md.value(1.0, 0.0)
    assert ratio == pytest.approx(1.0 / math.cosh(nu), rel=1e-12)


def test_mode_value_outside_domain():
    md = make_mode(FamilyTag.CONST, Rectangle(0.5))
    with pytest.raises(GeometryError):
        md.value(0.0, 0.6)


def test_normal_derivative_rejects_corner_and_interior():
    rect = Rectangle(1.0)
    md = make_mode(FamilyTag.XY, rect)
    with pytest.raises(GeometryError):
        mode_normal_derivative(md, 1.0, 1.0)
    with pytest.raises(GeometryError):
        mode_normal_derivative(md, 0.2, 0.2)


def test_steklov_identity_at_random_boundary_points(spec_pf5):
    rng = random.Random(3)
    rect = spec_pf5.rectangle
    for md in spec_pf5.modes:
        peak = 1.0
        samples = []
        for _ in range(100):
            side = rng.choice(SIDES)
            lo, hi = rect.side_interval(side)
            t = lo + (hi - lo) * (0.001 + 0.998 * rng.random())
            samples.append((side, t))
            peak = max(peak, abs(md.trace(side, t)))
        for side, t in samples:
            resid = abs(md.normal_derivative_on(side, t) - md.delta * md.trace(side, t))
            assert resid <= 1e-8 * (1.0 + md.delta) * peak


def test_boundary_orthonormality_oracle(spec_pf5):
    G = gauss_boundary_matrix(spec_pf5)
    off = np.abs(G - np.eye(len(G))).max()
    assert off <= 1e-10


def test_interior_harmonicity_order():
    rect = Rectangle(1.0)
    nu = find_roots(FamilyTag.F5, rect, 1)[0]
    md = make_mode(FamilyTag.F5, rect, nu, 0)

    def lap(x, y, w):
        return (
            md.value(x + w, y) + md.value(x - w, y) + md.value(x, y + w) + md.value(x, y - w)
            - 4.0 * md.value(x, y)
        ) / (w * w)

    l1, l2 = abs(lap(0.21, -0.33, 0.02)), abs(lap(0.21, -0.33, 0.01))
    assert math.log2(l1 / l2) > 1.9


def test_overflow_safety_large_nu():
    rect = Rectangle(0.5)
    nu = find_roots(FamilyTag.F1, rect, 222)[-1]
    assert nu > 600.0
    md = make_mode(FamilyTag.F1, rect, nu, 221)
    vals = [md.value(x, y) for x in (-1.0, 0.0, 0.37, 1.0) for y in (-0.5, 0.0, 0.5)]
    assert all(math.isfinite(v) for v in vals)
    assert max(abs(v) for v in vals) < 1e3
    gx, gy = md.gradient(1.0, 0.25)
    assert math.isfinite(gx) and math.isfinite(gy)


def test_scale_mode():
    rect = Rectangle(1.0)
    nu = find_roots(FamilyTag.F1, rect, 1)[0]
    md = make_mode(FamilyTag.F1, rect, nu, 0)
    d1, ev1 = scale_mode(md, 1.0)
    assert d1 == md.delta and ev1(0.3, 0.4) == md.value(0.3, 0.4)
    d2, ev2 = scale_mode(md, 2.0)
    assert d2 == md.delta / 2.0
    # one-sided finite difference of the dilated mode along the outward normal
    eps = 1e-5
    x, y = 2.0, 0.6
    dn = (3 * ev2(x, y) - 4 * ev2(x - eps, y) + ev2(x - 2 * eps, y)) / (2 * eps)
    assert dn == pytest.approx(d2 * ev2(x, y), rel=1e-6)
    d0, _ = scale_mode(make_mode(FamilyTag.CONST, rect), 5.0)
    assert d0 == 0.0
    with pytest.raises(ValueError):
        scale_mode(md, 0.0)


def test_per_family_spectrum_counts(square, spec_pf5):
    assert len(spec_pf5.modes) == 41  # 1 + 8*5
    spec2 = build_spectrum(square, 2)
    assert len(spec2.modes) == 17  # 1 + 8*2
    spec1 = build_spectrum(square, 1)
    assert any(m.family is FamilyTag.XY and m.delta == 1.0 for m in spec1.modes)


def test_flat_rectangle_spectrum_counts():
    spec = build_spectrum(Rectangle(0.5), 3)
    assert len(spec.modes) == 25
    per_family = {}
    for md in spec.nonconstant:
        per_family[md.family] = per_family.get(md.family, 0) + 1
    assert all(v == 3 for v in per_family.values())


def test_square_class2_block_composition(spec_pf5):
    # xy leads class II and displaces the deepest separable slot
    c2 = [m for m in spec_pf5.nonconstant
          if m.family in (FamilyTag.XY, FamilyTag.F3, FamilyTag.F4)]
    assert len(c2) == 10
    assert sum(1 for m in c2 if m.family is FamilyTag.XY) == 1
    assert sum(1 for m in c2 if m.family is FamilyTag.F3) == 5
    assert sum(1 for m in c2 if m.family is FamilyTag.F4) == 4


def test_spectrum_sorted_and_unique(spec_pf5):
    deltas = [m.delta for m in spec_pf5.modes]
    assert deltas == sorted(deltas)
    keys = [m.key for m in spec_pf5.modes]
    assert len(set(keys)) == len(keys)
    assert spec_pf5.modes[0].family is FamilyTag.CONST
    # degenerate square pairs (equal frequency, different profile) are both kept
    by_family = {}
    for m in spec_pf5.nonconstant:
        by_family.setdefault(m.family, []).append(m.nu)
    assert by_family[FamilyTag.F1] == by_family[FamilyTag.F2]
    assert by_family[FamilyTag.F5] == by_family[FamilyTag.F8]
    assert by_family[FamilyTag.F6] == by_family[FamilyTag.F7]
    assert by_family[FamilyTag.F3][:4] == by_family[FamilyTag.F4]


def test_select_is_nested(spec_pf5):
    sub = spec_pf5.select(2)
    assert len(sub.modes) == 17
    keys5 = {m.key for m in spec_pf5.modes}
    assert all(m.key in keys5 for m in sub.modes)
    deltas = [m.delta for m in sub.modes]
    assert deltas == sorted(deltas)


def test_global_spectrum_by_count(square):
    spec = build_spectrum_by_count(square, 80)
    assert len(spec.nonconstant) == 80
    deltas = [m.delta for m in spec.nonconstant]
    assert deltas == sorted(deltas)
    sub = spec.select(2)  # first 16
    assert len(sub.nonconstant) == 16
    assert [m.key for m in sub.nonconstant] == [m.key for m in spec.nonconstant[:16]]


def test_global_policy_build(square):
    spec = build_spectrum(square, 2, GLOBAL_SORTED)
    assert len(spec.nonconstant) == 16
    assert spec.selection == GLOBAL_SORTED


def test_cache_roundtrip(spec_pf5):
    text = spectrum_to_json(spec_pf5)
    spec2 = spectrum_from_json(text)
    assert len(spec2.modes) == len(spec_pf5.modes)
    for a, b in zip(spec_pf5.modes, spec2.modes):
        assert a.key == b.key
        assert a.delta == b.delta
        assert a.norm_const == pytest.approx(b.norm_const, rel=1e-15)
    assert spec2.selection == spec_pf5.selection


def test_cache_rejects_corrupted_nu(spec_pf5):
    text = spectrum_to_json(spec_pf5)
    md = spec_pf5.nonconstant[0]
    bad = text.replace(format(md.nu, ".17g"), format(md.nu * 1.001, ".17g"), 1)
    with pytest.raises(SpectrumError):
        spectrum_from_json(bad)


def test_vectorized_value_matches_scalar(spec_pf5):
    rng = random.Random(11)
    xs = np.array([rng.uniform(-1, 1) for _ in range(40)])
    ys = np.array([rng.uniform(-1, 1) for _ in range(40)])
    for md in spec_pf5.modes[::7]:
        arr = md.value_array(xs, ys)
        ref = np.array([md.value(x, y) for x, y in zip(xs, ys)])
        assert np.abs(arr - ref).max() <= 1e-14 * max(1.0, np.abs(ref).max())
        gx, gy = md.gradient_arrays(xs, ys)
        gref = np.array([md.gradient(x, y) for x, y in zip(xs, ys)])
        assert np.abs(gx - gref[:, 0]).max() <= 1e-12 * max(1.0, np.abs(gref).max())
        assert np.abs(gy - gref[:, 1]).max() <= 1e-12 * max(1.0, np.abs(gref).max())
