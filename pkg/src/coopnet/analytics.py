"""Mean-field payoff estimates and neighbor-renewal (meeting) probabilities.

The payoff estimates coarse-grain a node's surroundings into a local
cooperator fraction x, a useful-cooperator fraction u, and a degree k, plus
the global pair (x_t, <k>).  The meeting-probability half computes, for a
node jumping a fixed distance each slot inside a disk field, how the next
slot's neighborhood splits between retained and newly met nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


def defector_payoff_estimate(local_coop, useful, degree, global_coop, mean_degree):
    """Mean-field payoff of a defector with the given surroundings.

    [1 / (x_i k_i + 1)] * [u_i x_i k_i / (x_t <k> + 1)]: a defector only
    collects from useful cooperating neighbors, discounted by local and
    global sharing.
    """
    xk = np.asarray(local_coop, dtype=float) * degree
    out = (1.0 / (xk + 1.0)) * (useful * xk / (global_coop * mean_degree + 1.0))
    return out if out.shape else float(out)


def cooperator_payoff_estimate(local_coop, useful, degree, global_coop, mean_degree):
    """Mean-field payoff of a cooperator: the defector estimate minus the
    shared transmission cost 1 / (x_j k_j + 1)."""
    xk = np.asarray(local_coop, dtype=float) * degree
    base = defector_payoff_estimate(local_coop, useful, degree, global_coop, mean_degree)
    out = base - 1.0 / (xk + 1.0)
    return out if out.shape else float(out)


def transition_propensity(
    defector_stats: tuple,
    cooperator_stats: tuple,
    global_coop: float,
    mean_degree: float,
):
    """Unnormalized tendency of a defector to adopt a cooperating neighbor.

    Both stats are (local_coop, useful, degree) triples for the defector i
    and the cooperator j.  Positive values mean the cooperator looks better
    once its cost is accounted for; the global factor only rescales.
    """
    x_i, u_i, k_i = defector_stats
    x_j, u_j, k_j = cooperator_stats
    xk_i = np.asarray(x_i, dtype=float) * k_i
    xk_j = np.asarray(x_j, dtype=float) * k_j
    gain = (u_j * xk_j / (xk_j + 1.0)) - (u_i * xk_i / (xk_i + 1.0))
    out = gain / (global_coop * mean_degree + 1.0) - 1.0 / (xk_j + 1.0)
    return out if out.shape else float(out)


def useful_neighbor_probability(global_coop, clustering, degree, held_self, held_neighbor):
    """Probability that a random neighbor is a useful cooperator.

    A neighbor holding more packets is useful whenever it cooperates; one
    holding at most as many is useful only if some of its packets came from
    outside the shared (clustered) part of the two neighborhoods, which
    fails with probability (c_j (k_j - 1) / k_j) ** m_j per packet batch.
    """
    xt = np.asarray(global_coop, dtype=float)
    if np.any(np.asarray(degree) < 1):
        raise ValueError("degree must be at least 1")
    overlap = clustering * (np.asarray(degree, dtype=float) - 1.0) / degree
    more = np.asarray(held_neighbor) > held_self
    out = np.where(more, xt, xt * (1.0 - overlap ** np.asarray(held_neighbor)))
    return out if out.shape else float(out)


@dataclass(frozen=True)
class MeetingGeometry:
    """One jump of length ``speed`` per slot, neighborhood radius ``radius``,
    nodes scattered over a disk of ``region_radius``."""

    speed: float
    radius: float = 75.0
    region_radius: float = 500.0

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be non-negative")
        if not (0 < self.radius < self.region_radius):
            raise ValueError("need 0 < radius < region_radius")


class QuadratureError(RuntimeError):
    """Adaptive integration failed to reach the requested tolerance."""


def _arc_fraction(d: float, speed: float, radius: float, arg_form: str) -> float:
    """Fraction of a node's jump directions that land within ``radius``.

    The jumping node sits at distance d from the target point.  The overlap
    angle comes from the law of cosines with the argument clamped to [-1, 1]
    so fully-contained and fully-disjoint cases come out as 1 and 0.
    ``arg_form="sum"`` flips the radius term's sign, which pushes the
    argument above 1 for all d > 0 and therefore clamps to a zero arc; it is
    kept only as a cross-check of the corrected form.
    """
    if d <= 0.0:
        return 1.0 if speed <= radius else 0.0
    if arg_form == "overlap":
        num = d * d + speed * speed - radius * radius
    elif arg_form == "sum":
        num = d * d + speed * speed + radius * radius
    else:
        raise ValueError(f"unknown arg_form {arg_form!r}")
    return math.acos(min(1.0, max(-1.0, num / (2.0 * speed * d)))) / math.pi


def meeting_probabilities_quadrature(
    geom: MeetingGeometry, arg_form: str = "overlap", tol: float = 1e-6
) -> tuple[float, float]:
    """(p_old, p_new): retention and acquisition probabilities per slot.

    p_old: probability a current neighbor (pre-jump distance distributed
    uniformly over the disk of ``radius``) is still a neighbor after both
    nodes jump.  p_new: probability a current non-neighbor (uniform over the
    annulus out to ``region_radius``) becomes one.  Both are nested adaptive
    integrals over the jump direction and the initial separation; a zero
    speed short-circuits to (1, 0).
    """
    v, rad, big_r = geom.speed, geom.radius, geom.region_radius
    if v == 0:
        return 1.0, 0.0

    def retention(x: float) -> float:
        def over_heading(theta: float) -> float:
            d = math.sqrt(max(0.0, v * v + x * x - 2.0 * x * v * math.cos(theta)))
            return _arc_fraction(d, v, rad, arg_form)

        val, _ = integrate.quad(over_heading, 0.0, math.pi, epsabs=1e-10, epsrel=1e-10, limit=200)
        return val / math.pi

    p_old, err_old = integrate.quad(
        lambda x: retention(x) * 2.0 * x / rad**2,
        0.0,
        rad,
        epsabs=1e-8,
        epsrel=1e-8,
        limit=200,
    )
    reach = min(big_r, rad + 2.0 * v)
    p_new, err_new = integrate.quad(
        lambda x: retention(x) * 2.0 * x / (big_r**2 - rad**2),
        rad,
        big_r,
        points=[reach],
        epsabs=1e-8,
        epsrel=1e-8,
        limit=200,
    )
    if err_old + err_new > tol:
        raise QuadratureError(
            f"estimated error {err_old + err_new:.2e} exceeds tolerance {tol:.0e}"
        )
    return float(np.clip(p_old, 0.0, 1.0)), float(np.clip(p_new, 0.0, 1.0))


def neighbor_fractions(p_old: float, p_new: float, geom: MeetingGeometry) -> tuple[float, float]:
    """Split the expected post-jump neighborhood into old and new members.

    Weights the two probabilities by the areas their populations occupy.
    Raises when both weights vanish (no neighbors expected at all).
    """
    for name, p in (("p_old", p_old), ("p_new", p_new)):
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"{name} must lie in [0, 1]")
    w_old = p_old * geom.radius**2
    w_new = p_new * (geom.region_radius**2 - geom.radius**2)
    total = w_old + w_new
    if total == 0.0:
        raise ValueError("both neighborhood weights are zero")
    return w_old / total, w_new / total


def meeting_monte_carlo(
    geom: MeetingGeometry, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Geometric oracle for (f_old, f_new) by direct simulation.

    Scatters field nodes uniformly over the disk, jumps the reference node
    and every field node once in independent uniform directions, and splits
    the post-jump neighborhood by whether each member was already a neighbor
    before the jumps.  Returns (nan, nan) if no sample lands in the
    neighborhood at all.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    v, rad, big_r = geom.speed, geom.radius, geom.region_radius
    r = big_r * np.sqrt(rng.random(samples))
    phi = rng.uniform(0.0, 2.0 * math.pi, samples)
    pos = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
    pre = r <= rad

    theta_ref = rng.uniform(0.0, 2.0 * math.pi, samples)
    theta_node = rng.uniform(0.0, 2.0 * math.pi, samples)
    rel = pos + v * (
        np.stack([np.cos(theta_node), np.sin(theta_node)], axis=1)
        - np.stack([np.cos(theta_ref), np.sin(theta_ref)], axis=1)
    )
    post = np.einsum("ij,ij->i", rel, rel) <= rad * rad

    kept = int(np.sum(pre & post))
    gained = int(np.sum(~pre & post))
    total = kept + gained
    if total == 0:
        return float("nan"), float("nan")
    return kept / total, gained / total


def meeting_fractions_quadrature(
    geom: MeetingGeometry, arg_form: str = "overlap", tol: float = 1e-6
) -> tuple[float, float]:
    """Convenience wrapper: quadrature probabilities fed through the
    area-weighted split."""
    p_old, p_new = meeting_probabilities_quadrature(geom, arg_form, tol)
    return neighbor_fractions(p_old, p_new, geom)
