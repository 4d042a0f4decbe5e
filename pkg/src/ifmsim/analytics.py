"""Closed-form detection probabilities for every scheme.

These evaluators are independent of the state-vector simulator: they work
on 2x2 polarisation blocks (one per OAM value) or directly on the exact
outcome tables, and serve both as oracles for the simulator and as fast
evaluators for parameter sweeps.

For a semi-transparent pixel with transmission T the single-cycle block is

    m(T, theta) = [[cos(theta), -sin(theta)],
                   [sqrt(T) sin(theta), sqrt(T) cos(theta)]]

acting on the (H, V) amplitude pair; N cycles are the N-th matrix power,
computed by repeated squaring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ifmsim import core
from ifmsim.core import EV_DETECTORS, POL_H, POL_V, SINGLE_PIXEL_DETECTORS, PixelPattern
from ifmsim.schemes import SchemeConfig


@dataclass(frozen=True)
class AnalyticReport:
    """Closed-form per-detector probabilities.

    ``exact`` holds exact values when a closed form exists, ``asymptotic``
    the large-N approximations where defined.  ``efficiency`` is the
    probability of an object-revealing click given an opaque pixel,
    conditioned on the photon probing that pixel.
    """

    exact: dict[str, float] | None
    asymptotic: dict[str, float] | None
    p_abs: float
    efficiency: float | None = None

    def __post_init__(self) -> None:
        if self.exact is not None:
            total = sum(self.exact.values()) + self.p_abs
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"exact probabilities sum to {total!r}, not 1")


def transmission_block(transmission: float, theta: float) -> np.ndarray:
    """Single-cycle (H, V) block for one OAM value."""
    if not (0.0 <= transmission <= 1.0):
        raise ValueError(f"transmission {transmission} outside [0, 1]")
    c, s = np.cos(theta), np.sin(theta)
    r = np.sqrt(transmission)
    return np.array([[c, -s], [r * s, r * c]], dtype=np.float64)


def block_probabilities(transmission: float, theta: float, n_cycles: int) -> tuple[float, float]:
    """(p_h, p_v) for a unit-weight pixel after ``n_cycles`` cycles."""
    m = np.linalg.matrix_power(transmission_block(transmission, theta), n_cycles)
    amps = m @ np.array([1.0, 0.0])
    return float(amps[0] ** 2), float(amps[1] ** 2)


def ev_table(f: int) -> AnalyticReport:
    """Exact single-pass outcome probabilities for one pixel.

    Absent object: the bright detector fires with certainty.  Present
    object: (1/4, 1/4, 1/2) for bright, dark and absorption.
    """
    d0, d1 = EV_DETECTORS
    if f == 0:
        exact = {d0: 1.0, d1: 0.0}
        p_abs = 0.0
    elif f == 1:
        exact = {d0: 0.25, d1: 0.25}
        p_abs = 0.5
    else:
        raise ValueError(f"occupancy bit must be 0 or 1, got {f!r}")
    return AnalyticReport(exact, None, p_abs, efficiency=0.25)


def zeno_single_exact(n_cycles: int, f: int = 1) -> AnalyticReport:
    """Exact cycling-scheme probabilities for one pixel at theta = pi/2N."""
    if n_cycles < 1:
        raise ValueError(f"cycle count must be >= 1, got {n_cycles}")
    dh, dv = SINGLE_PIXEL_DETECTORS
    theta = np.pi / (2 * n_cycles)
    if f == 0:
        ph = float(np.cos(n_cycles * theta) ** 2)
        exact = {dh: ph, dv: 1.0 - ph}
        p_abs = 0.0
        efficiency = None
    elif f == 1:
        ph = float(np.cos(theta) ** (2 * n_cycles))
        exact = {dh: ph, dv: 0.0}
        p_abs = 1.0 - ph
        efficiency = ph
    else:
        raise ValueError(f"occupancy bit must be 0 or 1, got {f!r}")
    return AnalyticReport(exact, None, p_abs, efficiency=efficiency)


def multipixel_single_pass_table(d: int, pattern: PixelPattern) -> AnalyticReport:
    """Exact per-detector probabilities of the parallel single-pass scheme.

    Each pixel behaves like an independent single-pass experiment carrying
    weight 1/d: transparent pixels put 1/d on the bright port, opaque ones
    1/4d on each port and 1/2d into absorption.
    """
    if pattern.d != d:
        raise ValueError(f"pattern has {pattern.d} pixels, expected {d}")
    if not pattern.is_binary:
        raise ValueError("single-pass table requires an opaque/transparent pattern")
    exact: dict[str, float] = {}
    for ell, f in enumerate(pattern.f):
        exact[core.port_detector_label("0", ell)] = (0.25 / d) if f else (1.0 / d)
    for ell, f in enumerate(pattern.f):
        exact[core.port_detector_label("d", ell)] = (0.25 / d) if f else 0.0
    p_abs = 0.5 * pattern.n_abs / d
    return AnalyticReport(exact, None, p_abs, efficiency=0.25)


def multipixel_zeno_survival(d: int, n_abs: int, n_cycles: int, theta: float) -> float:
    """Exact survival of the cycling scheme with ``n_abs`` opaque pixels.

    1 - (n_abs/d) (1 - cos^2N(theta)); opaque pixels lose the rotated
    amplitude every cycle while transparent ones evolve unitarily.
    """
    if not (0 <= n_abs <= d):
        raise ValueError(f"opaque pixel count {n_abs} outside 0..{d}")
    return 1.0 - (n_abs / d) * (1.0 - float(np.cos(theta) ** (2 * n_cycles)))


def per_cycle_absorption(d: int, n_abs: int, n: int, theta: float) -> float:
    """Conditional absorption probability during cycle n+1.

    n_abs cos^2n(theta) sin^2(theta) / (d - n_abs + n_abs cos^2n(theta)),
    conditioned on the photon having survived the first n cycles.
    """
    if n < 0:
        raise ValueError(f"completed cycle count must be >= 0, got {n}")
    if not (0 <= n_abs <= d):
        raise ValueError(f"opaque pixel count {n_abs} outside 0..{d}")
    c2n = float(np.cos(theta) ** (2 * n))
    denom = d - n_abs + n_abs * c2n
    if denom == 0.0:
        return 0.0
    return n_abs * c2n * float(np.sin(theta) ** 2) / denom


def semitransparent_exact(
    d: int,
    n_cycles: int,
    theta: float,
    transmissions: tuple[float, ...] | list[float],
) -> AnalyticReport:
    """Exact cycling-scheme probabilities for arbitrary transmissions.

    Each OAM value evolves under its own 2x2 block raised to the N-th power
    applied to the (1/sqrt(d), 0) input; detector probabilities are the
    squared output amplitudes.
    """
    ts = tuple(float(t) for t in transmissions)
    if len(ts) != d:
        raise ValueError(f"expected {d} transmissions, got {len(ts)}")
    exact: dict[str, float] = {}
    total = 0.0
    for ell, t in enumerate(ts):
        ph, pv = block_probabilities(t, theta, n_cycles)
        exact[core.pol_detector_label(ell, POL_H)] = ph / d
        exact[core.pol_detector_label(ell, POL_V)] = pv / d
        total += (ph + pv) / d
    p_abs = 1.0 - total
    binary = all(t in (0.0, 1.0) for t in ts)
    efficiency = float(np.cos(theta) ** (2 * n_cycles)) if binary else None
    return AnalyticReport(exact, None, p_abs, efficiency=efficiency)


def semitransparent_asymptotic(
    d: int,
    n_cycles: int,
    transmissions: tuple[float, ...] | list[float],
) -> AnalyticReport:
    """Large-N approximations at theta = pi/2N for transmissions in [0, 1).

    p_h = (1/d) (1 - (1+sqrt(T))/(1-sqrt(T)) pi^2/4N) and
    p_v = (1/d) T/(1-sqrt(T))^2 pi^2/4N^2 per pixel.  The formulas have a
    pole at T = 1, so fully transparent pixels are rejected.
    """
    ts = tuple(float(t) for t in transmissions)
    if len(ts) != d:
        raise ValueError(f"expected {d} transmissions, got {len(ts)}")
    asym: dict[str, float] = {}
    for ell, t in enumerate(ts):
        if not (0.0 <= t < 1.0):
            raise ValueError(
                f"transmission T_{ell}={t} not in [0, 1): the large-N expansion "
                "has a pole at 1 - sqrt(T) = 0"
            )
        r = np.sqrt(t)
        ph = (1.0 - (1.0 + r) / (1.0 - r) * np.pi**2 / (4 * n_cycles)) / d
        pv = (t / (1.0 - r) ** 2) * np.pi**2 / (4 * n_cycles**2) / d
        asym[core.pol_detector_label(ell, POL_H)] = float(ph)
        asym[core.pol_detector_label(ell, POL_V)] = float(pv)
    p_abs = 1.0 - sum(asym.values())
    return AnalyticReport(None, asym, p_abs)


def _swap_hv_labels(probs: dict[str, float]) -> dict[str, float]:
    swapped = {}
    for label, p in probs.items():
        if label.endswith("_h"):
            swapped[label[:-2] + "_v"] = p
        elif label.endswith("_v"):
            swapped[label[:-2] + "_h"] = p
        else:
            swapped[label] = p
    return swapped


def exact_distribution(config: SchemeConfig) -> AnalyticReport:
    """Exact closed-form report for any scheme configuration.

    Single-pass kinds require opaque/transparent patterns.  The folded
    scheme is evaluated through the cycling closed form with the per-cycle
    rotation and the switch-out label reversal applied.
    """
    kind = config.kind
    pattern = config.pattern
    if kind == "ev-single-pass":
        if not pattern.is_binary:
            raise ValueError("no closed form for a semi-transparent single-pass run")
        return ev_table(pattern.f[0])
    if kind == "multipixel-single-pass":
        return multipixel_single_pass_table(config.d, pattern)
    if kind == "zeno-single-pixel":
        if not pattern.is_binary:
            raise ValueError("zeno-single-pixel closed form requires a binary pattern")
        if config.theta is not None and abs(config.theta - np.pi / (2 * config.n_cycles)) > 1e-12:
            raise ValueError("zeno-single-pixel closed form assumes theta = pi/2N")
        return zeno_single_exact(config.n_cycles, pattern.f[0])
    if kind in ("multipixel-zeno", "semitransparent-zeno", "michelson-zeno"):
        report = semitransparent_exact(
            config.d, config.n_cycles, config.cycle_rotation, pattern.transmissions
        )
        if kind == "michelson-zeno":
            assert report.exact is not None
            report = AnalyticReport(
                _swap_hv_labels(report.exact), None, report.p_abs, report.efficiency
            )
        return report
    raise ValueError(f"unknown scheme kind {kind!r}")


def asymptotic_distribution(config: SchemeConfig) -> AnalyticReport | None:
    """Large-N report for cycling schemes at the canonical angle, else None.

    Fully transparent pixels take their exact limit values (p_v = 1/d)
    instead of the poled expansion.
    """
    if config.kind not in ("multipixel-zeno", "semitransparent-zeno", "michelson-zeno",
                           "zeno-single-pixel"):
        return None
    if config.theta is not None:
        return None
    d = config.d
    n = config.n_cycles
    asym: dict[str, float] = {}
    for ell, t in enumerate(config.pattern.transmissions):
        if t == 1.0:
            ph, pv = 0.0, 1.0 / d
        else:
            r = np.sqrt(t)
            ph = float((1.0 - (1.0 + r) / (1.0 - r) * np.pi**2 / (4 * n)) / d)
            pv = float((t / (1.0 - r) ** 2) * np.pi**2 / (4 * n**2) / d)
        asym[core.pol_detector_label(ell, POL_H)] = ph
        asym[core.pol_detector_label(ell, POL_V)] = pv
    if config.kind == "michelson-zeno":
        asym = _swap_hv_labels(asym)
    if config.kind == "zeno-single-pixel":
        dh, dv = SINGLE_PIXEL_DETECTORS
        asym = {dh: asym["D0_h"], dv: asym["D0_v"]}
    p_abs = 1.0 - sum(asym.values())
    return AnalyticReport(None, asym, p_abs)
