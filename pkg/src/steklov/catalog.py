"""Built-in boundary data and the matching exact harmonic solutions.

Dirichlet test data (traces of harmonic functions):

    f1 = x^4 - 6 x^2 y^2 + y^4        (Re z^4)
    f2 = (2 - x) / ((2 - x)^2 + y^2)  (Re 1/(2 - z))
    f3 = ln sqrt((x-3)^2 + (y-3)^2)   (Re ln(z - 3 - 3i))

Flux-type data with known solutions on R_h:

    bd1: +1 on G1, G2 and -1 on G3, G4; Neumann data of u = x + y
    bd2: +2 on G1, G3 and -2h on G2, G4; Neumann data of u = x^2 - y^2
    bd3: Robin data (b = 1) of u = e^x sin y, discontinuous at corners

bd1 and bd2 are deliberately discontinuous at corners even though their
solutions are smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .boundary import BoundaryFunction
from .geometry import Rectangle, Side

BUILTIN_NAMES = ("f1", "f2", "f3", "bd1", "bd2", "bd3")


@dataclass(frozen=True)
class ExactSolution:
    name: str
    value: Callable[[float, float], float]
    gradient: Callable[[float, float], tuple[float, float]]


def f1(x: float, y: float) -> float:
    return x**4 - 6.0 * x * x * y * y + y**4


def f1_gradient(x: float, y: float) -> tuple[float, float]:
    return (4.0 * x**3 - 12.0 * x * y * y, 4.0 * y**3 - 12.0 * x * x * y)


def f2(x: float, y: float) -> float:
    w = 2.0 - x
    return w / (w * w + y * y)


def f2_gradient(x: float, y: float) -> tuple[float, float]:
    # f2 = Re 1/(2-z); d/dz 1/(2-z) = 1/(2-z)^2, grad = (Re F', -Im F')
    w = 2.0 - x
    d = w * w + y * y
    return ((w * w - y * y) / (d * d), -2.0 * w * y / (d * d))


def f3(x: float, y: float) -> float:
    return 0.5 * math.log((x - 3.0) ** 2 + (y - 3.0) ** 2)


def f3_gradient(x: float, y: float) -> tuple[float, float]:
    r2 = (x - 3.0) ** 2 + (y - 3.0) ** 2
    return ((x - 3.0) / r2, (y - 3.0) / r2)


def _u_linear(x, y):
    return x + y


def _u_saddle(x, y):
    return x * x - y * y


def _u_exp_sin(x, y):
    return math.exp(x) * math.sin(y)


EXACT_SOLUTIONS = {
    "f1": ExactSolution("f1", f1, f1_gradient),
    "f2": ExactSolution("f2", f2, f2_gradient),
    "f3": ExactSolution("f3", f3, f3_gradient),
    "bd1": ExactSolution("x+y", _u_linear, lambda x, y: (1.0, 1.0)),
    "bd2": ExactSolution("x^2-y^2", _u_saddle, lambda x, y: (2.0 * x, -2.0 * y)),
    "bd3": ExactSolution(
        "e^x sin y",
        _u_exp_sin,
        lambda x, y: (math.exp(x) * math.sin(y), math.exp(x) * math.cos(y)),
    ),
}


def builtin_boundary(name: str, rect: Rectangle, b: Optional[float] = None) -> BoundaryFunction:
    """Construct one of the named data sets on a given rectangle.

    bd3 is Robin data tied to b = 1; passing any other b is rejected rather
    than silently producing data for the wrong problem.
    """
    if name in ("f1", "f2", "f3"):
        fn = {"f1": f1, "f2": f2, "f3": f3}[name]
        return BoundaryFunction.from_xy(fn, rect, name)
    h = rect.h
    if name == "bd1":
        return BoundaryFunction.from_sides(
            rect, {Side.G1: 1.0, Side.G2: 1.0, Side.G3: -1.0, Side.G4: -1.0}, "bd1"
        )
    if name == "bd2":
        return BoundaryFunction.from_sides(
            rect,
            {Side.G1: 2.0, Side.G2: -2.0 * h, Side.G3: 2.0, Side.G4: -2.0 * h},
            "bd2",
        )
    if name == "bd3":
        if b is not None and b != 1.0:
            raise ValueError(f"bd3 is defined for the Robin constant b = 1, got b = {b}")
        edge = math.cos(h) + math.sin(h)
        return BoundaryFunction.from_sides(
            rect,
            {
                Side.G1: lambda x, y: 2.0 * math.e * math.sin(y),
                Side.G2: lambda x, y, c=edge: math.exp(x) * c,
                Side.G3: 0.0,
                Side.G4: lambda x, y, c=edge: -math.exp(x) * c,
            },
            "bd3",
        )
    raise ValueError(f"unknown builtin boundary data {name!r}; choose from {BUILTIN_NAMES}")


def exact_solution_for(name: str) -> Optional[ExactSolution]:
    return EXACT_SOLUTIONS.get(name)


def boundary_data_from_spec(obj: dict, rect: Rectangle, b: Optional[float] = None) -> BoundaryFunction:
    """Build boundary data from its JSON form.

    Accepted shapes: {"builtin": name}, {"expr": text}, or
    {"sides": {"G1": v, ...}} where each side value is a number (constant),
    a string (expression in x and y), or a list (polynomial coefficients in
    the side parameter, low order first).
    """
    from . import expressions

    if "builtin" in obj:
        return builtin_boundary(obj["builtin"], rect, b)
    if "expr" in obj:
        return BoundaryFunction.from_expression(obj["expr"], rect)
    if "sides" in obj:
        sides = obj["sides"]
        maps = {}
        polys = {}
        for side in Side:
            try:
                entry = sides[side.name]
            except KeyError:
                raise ValueError(f"boundary spec is missing side {side.name}") from None
            if isinstance(entry, str):
                tree = expressions.parse(entry)
                maps[side] = lambda x, y, t=tree: expressions.evaluate(t, x, y)
            elif isinstance(entry, (list, tuple)):
                polys[side] = entry
            else:
                maps[side] = float(entry)
        if polys:
            poly_fn = BoundaryFunction.from_side_polynomials(
                rect, {s: polys.get(s, [0.0]) for s in Side}
            )
            for side in polys:
                maps[side] = poly_fn.side_maps[side]
        return BoundaryFunction.from_sides(rect, maps, obj.get("name", "sides"))
    raise ValueError("boundary spec needs one of the keys: builtin, expr, sides")
