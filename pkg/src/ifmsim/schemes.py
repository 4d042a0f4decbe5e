"""Assembly and execution of the interaction-free imaging schemes.

Each scheme is an ordered list of optical elements plus a detector map:

* ``ev-single-pass``        - balanced two-arm interferometer, one pixel.
* ``zeno-single-pixel``     - cycling interrogation of one pixel.
* ``multipixel-single-pass``- OAM-encoded parallel version of the first.
* ``multipixel-zeno``       - OAM-encoded cycling scheme.
* ``michelson-zeno``        - folded cycling scheme, half rotation per pass,
                              Pockels switch-out (detector meaning reversed).
* ``semitransparent-zeno``  - the cycling scheme with arbitrary per-pixel
                              transmissions.

``run_scheme`` evolves the input photon cycle by cycle, records a survival
trace and projects the final state on the detectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from ifmsim import core
from ifmsim.core import (
    EV_DETECTORS,
    POL_H,
    POL_V,
    SINGLE_PIXEL_DETECTORS,
    SCHEME_KINDS,
    ZENO_KINDS,
    DetectionDistribution,
    DetectorMap,
    ElementOp,
    PhotonState,
    PixelPattern,
)

# Beyond this cycle count the final state is computed by matrix power
# (repeated squaring) instead of element-by-element application, keeping
# the number of rounding events logarithmic in N.
SEQUENTIAL_CYCLE_LIMIT = 256


@dataclass(frozen=True)
class SchemeConfig:
    """Full description of one experiment.

    ``theta`` is the rotation angle per rotator passage; when omitted it
    defaults to the canonical value pi/2N for the cycling schemes and
    pi/4N for the folded (Michelson) scheme, which sees the rotator twice
    per cycle.  Single-pass kinds ignore ``n_cycles`` and ``theta``.

    ``encoder_form`` selects between the composed elementary gates
    ("gates": sorter, converter, object, inverses) and the equivalent
    single OAM-diagonal attenuator ("oam-diagonal").
    """

    kind: str
    pattern: PixelPattern
    n_cycles: int = 1
    theta: float | None = None
    encoder_form: str = "gates"
    bs_convention: str = "hadamard"

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind in ("ev-single-pass", "zeno-single-pixel") and self.pattern.d != 1:
            raise ValueError(f"{self.kind} is a single-pixel scheme, got d={self.pattern.d}")
        if self.kind in ZENO_KINDS and self.n_cycles < 1:
            raise ValueError(f"cycle count must be >= 1, got N={self.n_cycles}")
        if self.theta is not None and not (0.0 < self.theta <= np.pi / 2):
            raise ValueError(f"rotation angle must lie in (0, pi/2], got {self.theta}")
        if self.encoder_form not in ("gates", "oam-diagonal"):
            raise ValueError(f"unknown encoder form {self.encoder_form!r}")

    @property
    def d(self) -> int:
        return self.pattern.d

    @property
    def effective_theta(self) -> float:
        """Rotation angle per rotator passage actually used in the run."""
        if self.theta is not None:
            return self.theta
        if self.kind == "michelson-zeno":
            return np.pi / (4 * self.n_cycles)
        return np.pi / (2 * self.n_cycles)

    @property
    def cycle_rotation(self) -> float:
        """Total polarisation rotation accumulated per cycle."""
        passes = 2 if self.kind == "michelson-zeno" else 1
        return passes * self.effective_theta


class TraceRecord(NamedTuple):
    cycle: int
    survival: float
    p_abs_cycle: float


@dataclass(frozen=True)
class SchemeTrace:
    """Per-cycle survival record of a run.

    ``survival[k]`` is the survival probability after cycle k+1 and
    ``p_abs_cycle[k]`` the conditional absorption probability during that
    cycle (given survival so far).
    """

    survival: tuple[float, ...]
    p_abs_cycle: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.survival)

    def records(self) -> Iterator[TraceRecord]:
        for k, (s, p) in enumerate(zip(self.survival, self.p_abs_cycle)):
            yield TraceRecord(k + 1, s, p)


@dataclass(frozen=True)
class BuiltScheme:
    """Element sequence and readout of one experiment."""

    cycle_elements: tuple[ElementOp, ...]
    switch_out: tuple[ElementOp, ...]
    n_cycles: int
    detector_map: DetectorMap


class SchemeResult(NamedTuple):
    state: PhotonState
    distribution: DetectionDistribution
    trace: SchemeTrace


def _encoder_elements(config: SchemeConfig) -> tuple[ElementOp, ...]:
    """Path-to-OAM encoder around the object, on arm 0."""
    d = config.d
    if config.encoder_form == "oam-diagonal":
        return (core.object_attenuator(config.pattern, "oam-diagonal"),)
    return (
        core.oam_sorter(d),
        core.oam_converter(d),
        core.object_attenuator(config.pattern, "pixel-paths"),
        core.oam_converter(d, inverse=True),
        core.oam_sorter(d, inverse=True),
    )


def _folded_encoder_elements(config: SchemeConfig) -> tuple[ElementOp, ...]:
    """Encoder of the folded scheme, including the arm mirror stage."""
    d = config.d
    if config.encoder_form == "oam-diagonal":
        return (core.object_attenuator(config.pattern, "oam-diagonal"),)
    return (
        core.oam_sorter(d),
        core.oam_converter(d),
        core.object_attenuator(config.pattern, "pixel-paths"),
        core.arm_mirrors(d),
        core.oam_converter(d, inverse=True),
        core.oam_sorter(d, inverse=True),
    )


def _port_detector_map(d: int, bright_mode: int) -> DetectorMap:
    """OAM-resolved detectors behind the two output ports.

    ``bright_mode`` is the port receiving the constructive interference for
    a fully transparent object; it carries the labels D0_ell, the dark port
    the labels Dd_ell.  Both pols feed the same port detector.
    """
    dark_mode = d if bright_mode == 0 else 0
    groups: dict[str, list[tuple[int, int, int]]] = {}
    for ell in range(d):
        groups[core.port_detector_label("0", ell)] = [
            (pol, ell, bright_mode) for pol in (POL_H, POL_V)
        ]
    for ell in range(d):
        groups[core.port_detector_label("d", ell)] = [
            (pol, ell, dark_mode) for pol in (POL_H, POL_V)
        ]
    return DetectorMap.from_groups(d, groups)


def _pol_detector_map(d: int) -> DetectorMap:
    """Polarisation- and OAM-resolved detectors on the readout mode d."""
    groups: dict[str, list[tuple[int, int, int]]] = {}
    for ell in range(d):
        groups[core.pol_detector_label(ell, POL_H)] = [(POL_H, ell, d)]
        groups[core.pol_detector_label(ell, POL_V)] = [(POL_V, ell, d)]
    return DetectorMap.from_groups(d, groups)


def _single_pixel_detector_map() -> DetectorMap:
    dh, dv = SINGLE_PIXEL_DETECTORS
    return DetectorMap.from_groups(1, {dh: [(POL_H, 0, 1)], dv: [(POL_V, 0, 1)]})


def _ev_detector_map(bright_mode: int) -> DetectorMap:
    d0, d1 = EV_DETECTORS
    dark_mode = 1 - bright_mode
    return DetectorMap.from_groups(1, {
        d0: [(POL_H, 0, bright_mode), (POL_V, 0, bright_mode)],
        d1: [(POL_H, 0, dark_mode), (POL_V, 0, dark_mode)],
    })


def build_scheme(config: SchemeConfig) -> BuiltScheme:
    """Ordered element list and detector map for ``config``.

    The final OAM sorters fanning the output ports onto individual
    detectors are folded into the detector map, which resolves (pol, OAM,
    port) directly.
    """
    d = config.d
    theta = config.effective_theta
    kind = config.kind
    # The Hadamard convention interferes constructively on mode 0, the
    # symmetric convention on mode d; detector D0 tracks the bright port.
    bright_mode = 0 if config.bs_convention == "hadamard" else d

    if kind == "ev-single-pass":
        elements = (
            core.beam_splitter(d, config.bs_convention),
            core.object_attenuator(config.pattern, "pixel-paths"),
            core.beam_splitter(d, config.bs_convention),
        )
        return BuiltScheme(elements, (), 1, _ev_detector_map(bright_mode))

    if kind == "multipixel-single-pass":
        elements = (
            core.beam_splitter(d, config.bs_convention),
            *_encoder_elements(config),
            core.beam_splitter(d, config.bs_convention),
        )
        return BuiltScheme(elements, (), 1, _port_detector_map(d, bright_mode))

    if kind in ("zeno-single-pixel", "multipixel-zeno", "semitransparent-zeno"):
        cycle = (
            core.polarisation_rotator(theta, d),
            core.polarising_beam_splitter(d),
            *_encoder_elements(config),
            core.polarising_beam_splitter(d),
        )
        dmap = _single_pixel_detector_map() if kind == "zeno-single-pixel" else _pol_detector_map(d)
        return BuiltScheme(cycle, (), config.n_cycles, dmap)

    if kind == "michelson-zeno":
        cycle = (
            core.polarisation_rotator(theta, d),
            core.mirror_reflect("retro", d),
            core.polarisation_rotator(theta, d),
            core.polarising_beam_splitter(d),
            *_folded_encoder_elements(config),
            core.polarising_beam_splitter(d),
        )
        return BuiltScheme(cycle, (core.pockels_flip(d),), config.n_cycles, _pol_detector_map(d))

    raise ValueError(f"unknown scheme kind {kind!r}")


def run_scheme(config: SchemeConfig) -> SchemeResult:
    """Evolve the input photon through ``config`` and read out the detectors.

    Returns the final (sub-normalized) state, the detection distribution and
    the per-cycle survival trace.
    """
    built = build_scheme(config)
    state = core.make_initial_state(config.d, config.kind)
    vec = state.flat.copy()

    survivals: list[float] = []
    p_cycle: list[float] = []
    prev = 1.0

    if built.n_cycles <= SEQUENTIAL_CYCLE_LIMIT:
        for _ in range(built.n_cycles):
            for op in built.cycle_elements:
                vec = op.matrix @ vec
            s = float(np.vdot(vec, vec).real)
            p_cycle.append(1.0 - s / prev if prev > 0.0 else 0.0)
            survivals.append(s)
            prev = s
        final_vec = vec
    else:
        cycle_op = core.compose(built.cycle_elements, label="cycle")
        m = cycle_op.matrix
        for _ in range(built.n_cycles):
            vec = m @ vec
            s = float(np.vdot(vec, vec).real)
            p_cycle.append(1.0 - s / prev if prev > 0.0 else 0.0)
            survivals.append(s)
            prev = s
        final_vec = np.linalg.matrix_power(m, built.n_cycles) @ state.flat

    for op in built.switch_out:
        final_vec = op.matrix @ final_vec

    final_state = PhotonState.from_flat(config.d, final_vec)
    distribution = core.detection_distribution(final_state, built.detector_map)
    trace = SchemeTrace(tuple(survivals), tuple(p_cycle))
    return SchemeResult(final_state, distribution, trace)


def final_state_ideal(config: SchemeConfig) -> PhotonState:
    """Large-N target state of the cycling scheme for an opaque/transparent object.

    Opaque pixels keep their H amplitude, transparent pixels are fully
    rotated to V, everything on the readout mode:
    (1/sqrt(d)) [ |H> sum_opaque |ell> + |V> sum_transparent |ell> ] |d>.
    """
    if config.kind != "multipixel-zeno":
        raise ValueError(f"ideal final state is defined for multipixel-zeno, got {config.kind!r}")
    if not config.pattern.is_binary:
        raise ValueError("ideal final state requires an opaque/transparent pattern")
    d = config.d
    amps = np.zeros((2, d, d + 1), dtype=np.complex128)
    for ell, f in enumerate(config.pattern.f):
        amps[POL_H if f else POL_V, ell, d] = 1.0 / np.sqrt(d)
    return PhotonState(d, amps)
