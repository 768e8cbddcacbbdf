"""Shared fixture families: every generator over a parameter matrix."""

from functools import lru_cache

from fifam.constructions import (
    ConstructionError,
    LayerSpec,
    bisection_max,
    chain_family,
    imin_constrained,
    layered_sunflower,
    three_layer,
    two_layer_shared,
)
from fifam.core import Family, HALF, Theta

THETAS = [Theta(1, 2), Theta(1, 3), Theta(2, 3), Theta(2, 5), Theta(1, 4), Theta(3, 4)]
GENERAL_THETAS = [Theta(1, 3), Theta(2, 3), Theta(2, 5), Theta(1, 4), Theta(3, 4)]


def _try(label, fn, *args, **kw):
    try:
        return [(label, fn(*args, **kw))]
    except ConstructionError:
        return []


@lru_cache(maxsize=None)
def generator_families(max_n: int = 40) -> tuple:
    out = []
    for n in range(2, max_n + 1):
        out.append((f"bisection_max({n})", bisection_max(n)))
    for theta in THETAS:
        b = theta.b
        for n in range(2, max_n + 1):
            out += _try(f"layered({n},{theta},[b])", layered_sunflower, n, theta, [LayerSpec(b)])
            out += _try(f"layered({n},{theta},[b,2b])", layered_sunflower, n, theta,
                        [LayerSpec(b), LayerSpec(2 * b, 1)])
            out += _try(f"two_layer({n},{theta})", two_layer_shared, n, theta)
            out += _try(f"chain({n},{theta})", chain_family, n, theta)
            if theta.a == 1:
                out += _try(f"three_layer({n},{theta})", three_layer, n, theta)
    for k in (4, 6, 8):
        for n in range(k + 4, max_n + 1):
            out += _try(f"imin({n},{k})", imin_constrained, n, k)
    return tuple(out)


SMALL_EXTRAS = [
    ("singleton-E_theta", Family.from_lists(3, 3, HALF, [[1], [1, 2], [1, 3]])),
    ("single-set", Family.from_lists(3, 3, HALF, [[1, 2, 3]])),
    ("exceptional-top", Family.from_lists(10, 3, HALF, [[1, 4], [1, 2, 5, 6], [1, 2, 3, 7, 8, 9]])),
]


def all_fixtures() -> list:
    return list(generator_families()) + SMALL_EXTRAS
