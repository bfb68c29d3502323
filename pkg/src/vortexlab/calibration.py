"""Frozen regression constants, computed once in pilot runs and treated as
fixed bounds thereafter (the theory constants they stand in for are not
explicit).  Stored as JSON next to the package so pinned values are data, not
code."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .grids import sphere_area


@lru_cache(maxsize=1)
def constants() -> dict:
    text = resources.files("vortexlab").joinpath("_calibration.json").read_text()
    return json.loads(text)


def w2_continuity_constant(n: int, radial_mass: float) -> float:
    """Modulus constant for W2(u(t1), u(t2)) <= C (t2^{1/n} - t1^{1/n}).

    The expanding-patch family saturates the modulus with coefficient
    (n M_rad)^{1/n} sqrt(n M_full/(n+2)); the calibrated safety factor covers
    scheme noise on non-patch radial data.
    """
    full = sphere_area(n) * radial_mass
    exact = (n * radial_mass) ** (1.0 / n) * (n * full / (n + 2.0)) ** 0.5
    return constants()["w2_continuity_safety"] * exact
