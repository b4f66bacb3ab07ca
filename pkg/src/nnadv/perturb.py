"""Exact lattice perturbation that makes the forced tour strictly unique.

Instead of real-valued noise, cities move by integer offsets on a refined
lattice (coordinates times ``new_scale``).  Offsets stay below
new_scale / (16 n) in magnitude, which is small enough that no two
unequal unperturbed distances can ever swap order; only genuine ties are
broken.  The search processes strict-validation failures front to back,
nudging the intended next city one lattice step toward its predecessor
and re-validating, with a global budget of 64 n nudges.
"""
from __future__ import annotations

import random
from dataclasses import replace

from .construction import build_adversarial_tour
from .engine import validate_tour
from .family import Instance, rescale
from .metrics import LpMetric, ScaledPoint


class StrictifyFailure(RuntimeError):
    """The perturbation search exhausted its budget before certifying."""

    def __init__(self, step: int, detail: str):
        self.step = step
        super().__init__(f"perturbation search failed; first still-invalid step is {step} ({detail})")


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def perturb(instance: Instance, scheme: str, new_scale: int, seed: int = 0) -> Instance:
    """Refine the lattice and optionally displace cities to kill all ties.

    Scheme ``none`` only multiplies coordinates.  Scheme ``strictify``
    additionally searches for integer displacements under which the
    instance's forced tour passes strict validation (a unique minimizer
    at every step); it raises instead of returning a non-certified
    instance.
    """
    if scheme not in ("none", "strictify"):
        raise ValueError(f"unknown perturbation scheme {scheme!r}")
    if instance.scale != 1:
        raise ValueError("perturbation expects an unscaled instance")
    n = instance.n
    if new_scale < 16 * n:
        raise ValueError(f"new_scale must be at least 16*n = {16 * n}, got {new_scale}")
    if scheme == "none":
        return rescale(instance, new_scale)

    if not isinstance(instance.metric, LpMetric):
        raise ValueError("strictify applies to Lp metrics only; hop counts ignore displacements")
    if instance.family_k is None:
        raise ValueError("strictify needs a family instance (its forced tour is the certificate)")

    order = build_adversarial_tour(instance.family_k).tour.order
    # Strictly below new_scale/(16n): the largest admissible offset magnitude.
    max_units = (new_scale + 16 * n - 1) // (16 * n) - 1
    if max_units < 1:
        raise ValueError(f"new_scale {new_scale} leaves no room to displace any city")

    rng = random.Random(seed)
    base = [(c.x * new_scale, c.y * new_scale) for c in instance.cities]
    offsets = [[0, 0] for _ in range(n)]

    def current() -> Instance:
        cities = tuple(ScaledPoint(bx + ox, by + oy) for (bx, by), (ox, oy) in zip(base, offsets))
        return replace(instance, cities=cities, scale=new_scale)

    def position(i: int) -> tuple[int, int]:
        return base[i][0] + offsets[i][0], base[i][1] + offsets[i][1]

    def _axis_step(city: int, anchor: int) -> tuple[int, int]:
        # One lattice unit along the dominant gap axis; a single-axis step
        # keeps the collateral movement of coupled ties minimal.
        cx, cy = position(city)
        ax, ay = position(anchor)
        gx, gy = ax - cx, ay - cy
        if abs(gx) >= abs(gy):
            return _sign(gx), 0
        return 0, _sign(gy)

    def nudge_toward(city: int, anchor: int) -> bool:
        """Move ``city`` one lattice step toward ``anchor``; False when out of room."""
        dx, dy = _axis_step(city, anchor)
        ox, oy = offsets[city][0] + dx, offsets[city][1] + dy
        if max(abs(ox), abs(oy)) > max_units:
            return False
        offsets[city][0], offsets[city][1] = ox, oy
        return True

    def nudge_away(city: int, anchor: int) -> bool:
        dx, dy = _axis_step(city, anchor)
        if dx == 0 and dy == 0:
            return False
        ox, oy = offsets[city][0] - dx, offsets[city][1] - dy
        if max(abs(ox), abs(oy)) > max_units:
            return False
        offsets[city][0], offsets[city][1] = ox, oy
        return True

    tour = build_adversarial_tour(instance.family_k).tour
    budget = 64 * n
    while budget > 0:
        verdict = validate_tour(current(), tour, "strict")
        if verdict.valid:
            return current()
        step = verdict.fail_step
        origin, intended = order[step], order[step + 1]
        budget -= 1
        if nudge_toward(intended, origin):
            continue
        # The intended city has no headroom left: push one of the other
        # tied cities away from the origin instead (seeded choice).
        blockers = sorted(verdict.tie_set - {intended})
        rng.shuffle(blockers)
        if not any(nudge_away(b, origin) for b in blockers):
            raise StrictifyFailure(step, "no admissible displacement left for the tied cities")

    verdict = validate_tour(current(), tour, "strict")
    if verdict.valid:
        return current()
    raise StrictifyFailure(verdict.fail_step, f"budget of {64 * n} nudges exhausted")
