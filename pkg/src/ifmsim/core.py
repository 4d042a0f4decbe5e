"""Photon states and optical elements for interaction-free imaging.

The simulation space is the tensor product

    polarisation {H, V}  x  OAM {0, ..., d-1}  x  spatial mode {0, ..., d}

Spatial modes 0..d-1 are the pixel paths inside the path-to-OAM encoder and
mode d is the reference arm; outside the encoder only modes 0 and d carry
amplitude.  Absorption at the object is modeled by scaling amplitudes, so
states are sub-normalized: the squared norm of a state is its survival
probability and the deficit from one is the accumulated absorption
probability.

Every optical element is a linear map on the flattened amplitude vector,
wrapped in an :class:`ElementOp` that records whether the map is unitary or
attenuating and how it is structured (permutation, diagonal, block, dense).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

POL_H = 0
POL_V = 1
POL_NAMES = ("h", "v")

UNITARY = "unitary"
ATTENUATOR = "attenuator"

ZENO_KINDS = frozenset({
    "zeno-single-pixel",
    "multipixel-zeno",
    "michelson-zeno",
    "semitransparent-zeno",
})
SINGLE_PASS_KINDS = frozenset({"ev-single-pass", "multipixel-single-pass"})
SCHEME_KINDS = ZENO_KINDS | SINGLE_PASS_KINDS

# Detector label conventions shared by the scheme builder and the analytic
# evaluators.
EV_DETECTORS = ("D0", "D1")
SINGLE_PIXEL_DETECTORS = ("Dh", "Dv")


def pol_detector_label(ell: int, pol: int) -> str:
    """Label of the polarisation-resolved detector for OAM value ``ell``."""
    return f"D{ell}_{POL_NAMES[pol]}"


def port_detector_label(port: str, ell: int) -> str:
    """Label of the OAM-resolved detector on output port ``'0'`` or ``'d'``."""
    return f"D{port}_{ell}"


def space_dim(d: int) -> int:
    """Dimension of the full polarisation x OAM x mode space."""
    return 2 * d * (d + 1)


def basis_index(d: int, pol: int, ell: int, mode: int) -> int:
    """Flat index of the basis state |pol, ell, mode>."""
    if not (0 <= pol <= 1 and 0 <= ell < d and 0 <= mode <= d):
        raise ValueError(f"basis labels out of range: pol={pol}, ell={ell}, mode={mode}, d={d}")
    return (pol * d + ell) * (d + 1) + mode


@dataclass(frozen=True)
class PhotonState:
    """Sub-normalized single-photon amplitude vector.

    ``amps`` has shape ``(2, d, d+1)`` indexed by (polarisation, OAM, mode).
    The squared norm is the survival probability, so it must not exceed 1.
    Instances are immutable; element applications return new states.
    """

    d: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"OAM dimension must be >= 1, got d={self.d}")
        a = np.array(self.amps, dtype=np.complex128)
        expected = (2, self.d, self.d + 1)
        if a.shape != expected:
            raise ValueError(f"amplitude array must have shape {expected}, got {a.shape}")
        n2 = float(np.vdot(a, a).real)
        if n2 > 1.0 + 1e-9:
            raise ValueError(f"state norm^2 = {n2} exceeds 1")
        a.setflags(write=False)
        object.__setattr__(self, "amps", a)

    @classmethod
    def from_flat(cls, d: int, flat: np.ndarray) -> "PhotonState":
        return cls(d, np.asarray(flat, dtype=np.complex128).reshape(2, d, d + 1))

    @property
    def flat(self) -> np.ndarray:
        return self.amps.reshape(-1)

    @property
    def survival(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def amplitude(self, pol: int, ell: int, mode: int) -> complex:
        return complex(self.amps[pol, ell, mode])

    def overlap(self, other: "PhotonState") -> complex:
        if other.d != self.d:
            raise ValueError("states live on different spaces")
        return complex(np.vdot(self.amps, other.amps))

    def __repr__(self) -> str:  # noqa: D105 - compact display, arrays are noisy
        return f"PhotonState(d={self.d}, survival={self.survival:.6g})"


def basis_state(d: int, pol: int, ell: int, mode: int) -> PhotonState:
    """Unit basis state |pol, ell, mode>."""
    amps = np.zeros((2, d, d + 1), dtype=np.complex128)
    amps[pol, ell, mode] = 1.0
    return PhotonState(d, amps)


def make_initial_state(d: int, scheme_kind: str) -> PhotonState:
    """Input photon for a scheme: H-polarised, equal OAM superposition.

    The photon enters on spatial mode 0 for the single-pass interferometers
    and on the reference mode d for the cycling (Zeno) schemes.
    """
    if d < 1:
        raise ValueError(f"pixel count must be >= 1, got d={d}")
    if scheme_kind not in SCHEME_KINDS:
        raise ValueError(f"unknown scheme kind {scheme_kind!r}")
    mode = 0 if scheme_kind in SINGLE_PASS_KINDS else d
    amps = np.zeros((2, d, d + 1), dtype=np.complex128)
    amps[POL_H, :, mode] = 1.0 / np.sqrt(d)
    return PhotonState(d, amps)


def survival_probability(state: PhotonState) -> float:
    """Total non-absorption probability, sum of |amplitude|^2."""
    return state.survival


@dataclass(frozen=True)
class ElementOp:
    """A linear optical element acting on the full simulation space.

    ``kind`` is ``"unitary"`` (norm preserving) or ``"attenuator"`` (a
    contraction).  ``structure`` is a purely descriptive tag used by tests
    and traces: ``"permutation"``, ``"diagonal"``, ``"block"`` or ``"dense"``.
    """

    label: str
    kind: str
    structure: str
    d: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.kind not in (UNITARY, ATTENUATOR):
            raise ValueError(f"unknown element kind {self.kind!r}")
        m = np.array(self.matrix, dtype=np.complex128)
        n = space_dim(self.d)
        if m.shape != (n, n):
            raise ValueError(f"element matrix must be {n}x{n} for d={self.d}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, state: PhotonState) -> PhotonState:
        if state.d != self.d:
            raise ValueError(f"element built for d={self.d} applied to state with d={state.d}")
        return PhotonState.from_flat(state.d, self.matrix @ state.flat)

    def __repr__(self) -> str:  # noqa: D105
        return f"ElementOp({self.label!r}, kind={self.kind}, structure={self.structure}, d={self.d})"


def compose(ops: Sequence[ElementOp], label: str | None = None) -> ElementOp:
    """Single element equivalent to applying ``ops`` in list order."""
    if not ops:
        raise ValueError("cannot compose an empty element sequence")
    d = ops[0].d
    if any(op.d != d for op in ops):
        raise ValueError("cannot compose elements built for different d")
    matrix = ops[0].matrix
    for op in ops[1:]:
        matrix = op.matrix @ matrix
    kind = ATTENUATOR if any(op.kind == ATTENUATOR for op in ops) else UNITARY
    structure = "permutation" if all(op.structure == "permutation" for op in ops) else "dense"
    if label is None:
        label = " > ".join(op.label for op in ops)
    return ElementOp(label, kind, structure, d, matrix)


def permutation_op(
    d: int,
    site_map: Callable[[int, int, int], tuple[int, int, int]],
    label: str,
) -> ElementOp:
    """Unitary element that permutes basis states via ``site_map``.

    ``site_map`` maps (pol, ell, mode) to its image; it must be a bijection
    on the basis.
    """
    n = space_dim(d)
    matrix = np.zeros((n, n), dtype=np.complex128)
    hit = np.zeros(n, dtype=bool)
    for pol in (POL_H, POL_V):
        for ell in range(d):
            for mode in range(d + 1):
                src = basis_index(d, pol, ell, mode)
                dst = basis_index(d, *site_map(pol, ell, mode))
                if hit[dst]:
                    raise ValueError(f"{label}: site map is not a bijection (target {dst} hit twice)")
                hit[dst] = True
                matrix[dst, src] = 1.0
    return ElementOp(label, UNITARY, "permutation", d, matrix)


def diagonal_op(d: int, factors: np.ndarray, label: str, kind: str) -> ElementOp:
    """Element that multiplies each basis amplitude by a fixed factor."""
    return ElementOp(label, kind, "diagonal", d, np.diag(np.asarray(factors, dtype=np.complex128)))


# ---------------------------------------------------------------------------
# Element constructors
# ---------------------------------------------------------------------------

def beam_splitter(d: int, convention: str = "hadamard") -> ElementOp:
    """Balanced beam splitter coupling spatial modes 0 and d.

    The default convention is the real Hadamard,
    |0> -> (|0> + |d>)/sqrt(2) and |d> -> (|0> - |d>)/sqrt(2).
    ``convention="symmetric"`` uses the 50/50 splitter with i phases on the
    reflected amplitudes instead; the two differ only in which output port
    carries the constructive interference.
    Modes 1..d-1 are untouched.
    """
    r = 1.0 / np.sqrt(2.0)
    if convention == "hadamard":
        block = np.array([[r, r], [r, -r]], dtype=np.complex128)
    elif convention == "symmetric":
        block = np.array([[r, 1j * r], [1j * r, r]], dtype=np.complex128)
    else:
        raise ValueError(f"unknown beam splitter convention {convention!r}")
    sub = np.eye(d + 1, dtype=np.complex128)
    sub[0, 0] = block[0, 0]
    sub[0, d] = block[0, 1]
    sub[d, 0] = block[1, 0]
    sub[d, d] = block[1, 1]
    matrix = np.kron(np.eye(2 * d, dtype=np.complex128), sub)
    return ElementOp(f"BS({convention})", UNITARY, "block", d, matrix)


def polarising_beam_splitter(d: int) -> ElementOp:
    """PBS sorting polarisations onto the two arms.

    The V component is exchanged between the reference mode d and the object
    arm mode 0, so the same element both splits (V on d goes to 0) and merges
    (V on 0 returns to d).  H passes straight through.
    """

    def site_map(pol: int, ell: int, mode: int) -> tuple[int, int, int]:
        if pol == POL_V and mode == 0:
            return pol, ell, d
        if pol == POL_V and mode == d:
            return pol, ell, 0
        return pol, ell, mode

    return permutation_op(d, site_map, "PBS")


def polarisation_rotator(theta: float, d: int) -> ElementOp:
    """Polarisation rotation by ``theta`` on every OAM value and mode.

    |H> -> cos(theta)|H> + sin(theta)|V>,
    |V> -> -sin(theta)|H> + cos(theta)|V>.
    """
    c, s = np.cos(theta), np.sin(theta)
    block = np.array([[c, -s], [s, c]], dtype=np.complex128)
    matrix = np.kron(block, np.eye(d * (d + 1), dtype=np.complex128))
    return ElementOp(f"R({theta:.6g})", UNITARY, "block", d, matrix)


def oam_sorter(d: int, inverse: bool = False) -> ElementOp:
    """OAM-to-path demultiplexer (a controlled mode shift).

    Forward action on the pixel paths is |ell>_OAM |m> -> |ell>_OAM |m+ell mod d>,
    so a photon entering on path 0 is routed to the path matching its OAM
    value.  The reference mode d is untouched.  ``inverse=True`` multiplexes
    the paths back.
    """
    sign = -1 if inverse else 1

    def site_map(pol: int, ell: int, mode: int) -> tuple[int, int, int]:
        if mode == d:
            return pol, ell, mode
        return pol, ell, (mode + sign * ell) % d

    name = "S^-1" if inverse else "S"
    return permutation_op(d, site_map, name)


def oam_converter(d: int, inverse: bool = False) -> ElementOp:
    """Path-controlled OAM shift bringing every pixel path to the Gaussian mode.

    Forward action on path m < d is |ell>_OAM -> |ell - m mod d>_OAM, so the
    sorted component on path ell is converted from |ell> to |0>.  The
    reference mode d is untouched.  ``inverse=True`` restores the OAM value.
    """
    sign = 1 if inverse else -1

    def site_map(pol: int, ell: int, mode: int) -> tuple[int, int, int]:
        if mode == d:
            return pol, ell, mode
        return pol, (ell + sign * mode) % d, mode

    name = "c^-1" if inverse else "c"
    return permutation_op(d, site_map, name)


def object_attenuator(pattern: "PixelPattern", placement: str) -> ElementOp:
    """The imaged object as an amplitude attenuator.

    ``placement="pixel-paths"`` puts the physical object across the encoder
    paths: the amplitude on path ell is multiplied by sqrt(T_ell) for any OAM
    value.  ``placement="oam-diagonal"`` is the composite encoder equivalent:
    the amplitude with OAM ell on arm 0 is multiplied by sqrt(T_ell).  Both
    leave the reference mode d untouched.
    """
    d = pattern.d
    roots = np.sqrt(np.asarray(pattern.transmissions, dtype=np.float64))
    factors = np.ones(space_dim(d), dtype=np.complex128)
    for pol in (POL_H, POL_V):
        for ell in range(d):
            if placement == "pixel-paths":
                for mode in range(d):
                    factors[basis_index(d, pol, ell, mode)] = roots[mode]
            elif placement == "oam-diagonal":
                factors[basis_index(d, pol, ell, 0)] = roots[ell]
            else:
                raise ValueError(f"unknown object placement {placement!r}")
    return diagonal_op(d, factors, f"object({placement})", ATTENUATOR)


def pockels_flip(d: int) -> ElementOp:
    """Switched-on Pockels cells: a 90 degree flip exchanging H and V."""

    def site_map(pol: int, ell: int, mode: int) -> tuple[int, int, int]:
        return 1 - pol, ell, mode

    return permutation_op(d, site_map, "P")


def mirror_reflect(kind: str, d: int) -> ElementOp:
    """Mirror acting on the OAM index.

    A retro-reflector gives a double reflection and leaves |ell> unchanged;
    a plain mirror maps |ell> to |-ell mod d>.
    """
    if kind == "retro":
        def site_map(pol: int, ell: int, mode: int) -> tuple[int, int, int]:
            return pol, ell, mode
        return permutation_op(d, site_map, "RR")
    if kind == "plain":
        def site_map(pol: int, ell: int, mode: int) -> tuple[int, int, int]:
            return pol, (d - ell) % d, mode
        return permutation_op(d, site_map, "M")
    raise ValueError(f"unknown mirror kind {kind!r}")


def arm_mirrors(d: int) -> ElementOp:
    """Mirror stage of the folded interferometer, both arms at once.

    Pixel paths 0..d-1 see a plain mirror (OAM sign flip; the converter has
    already brought them to |0>, where the flip is trivial) while the
    reference mode d sees a retro-reflector and is untouched.
    """

    def site_map(pol: int, ell: int, mode: int) -> tuple[int, int, int]:
        if mode == d:
            return pol, ell, mode
        return pol, (d - ell) % d, mode

    return permutation_op(d, site_map, "arm mirrors")


# ---------------------------------------------------------------------------
# Pixel patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PixelPattern:
    """Per-pixel transmission of the imaged object.

    ``transmissions[ell]`` is the intensity transmission T_ell in [0, 1].
    The occupancy bit is derived: a pixel is opaque exactly when T_ell = 0,
    fully transparent when T_ell = 1, and semi-transparent in between (its
    occupancy bit is stored as 0).
    """

    transmissions: tuple[float, ...]

    def __post_init__(self) -> None:
        t = tuple(float(x) for x in self.transmissions)
        if len(t) == 0:
            raise ValueError("pattern must have at least one pixel")
        for ell, val in enumerate(t):
            if not (0.0 <= val <= 1.0):
                raise ValueError(f"transmission T_{ell}={val} outside [0, 1]")
        object.__setattr__(self, "transmissions", t)

    @classmethod
    def from_bits(cls, bits: str | Sequence[int]) -> "PixelPattern":
        """Pattern from occupancy bits, 1 = opaque, 0 = transparent."""
        values = [int(b) for b in bits]
        if any(b not in (0, 1) for b in values):
            raise ValueError(f"occupancy bits must be 0 or 1, got {bits!r}")
        return cls(tuple(0.0 if b else 1.0 for b in values))

    @classmethod
    def opaque(cls, d: int) -> "PixelPattern":
        return cls((0.0,) * d)

    @classmethod
    def transparent(cls, d: int) -> "PixelPattern":
        return cls((1.0,) * d)

    @property
    def d(self) -> int:
        return len(self.transmissions)

    @property
    def f(self) -> tuple[int, ...]:
        """Occupancy bits: 1 where the pixel is fully opaque."""
        return tuple(1 if t == 0.0 else 0 for t in self.transmissions)

    @property
    def n_abs(self) -> int:
        """Number of opaque pixels."""
        return sum(self.f)

    @property
    def is_binary(self) -> bool:
        return all(t in (0.0, 1.0) for t in self.transmissions)


# ---------------------------------------------------------------------------
# Detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetectorMap:
    """Assignment of basis states to detector labels.

    ``assignment[i]`` is the position of the detector label measuring flat
    basis index ``i``, or -1 if that basis state is undetected.  Every basis
    state may feed at most one detector.
    """

    d: int
    labels: tuple[str, ...]
    assignment: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.assignment, dtype=np.int64)
        if a.shape != (space_dim(self.d),):
            raise ValueError("assignment must cover the full basis")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate detector labels")
        if a.max(initial=-1) >= len(self.labels):
            raise ValueError("assignment references an unknown label")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_groups(
        cls,
        d: int,
        groups: Mapping[str, Iterable[tuple[int, int, int]]],
    ) -> "DetectorMap":
        """Build a map from ``{label: [(pol, ell, mode), ...]}`` groups.

        Raises if any basis state is claimed by two detectors.
        """
        labels = tuple(groups.keys())
        assignment = np.full(space_dim(d), -1, dtype=np.int64)
        for pos, label in enumerate(labels):
            for pol, ell, mode in groups[label]:
                idx = basis_index(d, pol, ell, mode)
                if assignment[idx] != -1:
                    other = labels[assignment[idx]]
                    raise ValueError(
                        f"basis state (pol={pol}, ell={ell}, mode={mode}) mapped to "
                        f"both {other!r} and {label!r}"
                    )
                assignment[idx] = pos
        return cls(d, labels, assignment)


@dataclass(frozen=True)
class DetectionDistribution:
    """Click probability per detector plus the total absorption probability."""

    probabilities: dict[str, float]
    p_abs: float

    def __post_init__(self) -> None:
        for label, p in self.probabilities.items():
            if not (-1e-9 <= p <= 1.0 + 1e-9):
                raise ValueError(f"probability for {label!r} out of range: {p}")
        total = self.total()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"distribution does not sum to 1: total={total!r}")

    def total(self) -> float:
        return float(sum(self.probabilities.values()) + self.p_abs)

    def get(self, label: str) -> float:
        return self.probabilities[label]

    def relabel(self, mapping: Mapping[str, str]) -> "DetectionDistribution":
        """New distribution with detector labels renamed via ``mapping``."""
        return DetectionDistribution(
            {mapping.get(k, k): v for k, v in self.probabilities.items()}, self.p_abs
        )


def detection_distribution(state: PhotonState, detector_map: DetectorMap) -> DetectionDistribution:
    """Project a final state onto the detector basis.

    Detector probabilities are the squared amplitude mass routed to each
    label; the absorption probability is the state's norm deficit.  All
    probability mass must be covered, so amplitude on undetected basis
    states is an error.
    """
    if state.d != detector_map.d:
        raise ValueError("state and detector map dimensions differ")
    weights = np.abs(state.flat) ** 2
    assigned = detector_map.assignment >= 0
    unmapped = float(weights[~assigned].sum())
    if unmapped > 1e-9:
        raise ValueError(f"probability mass {unmapped} on undetected basis states")
    sums = np.bincount(
        detector_map.assignment[assigned],
        weights=weights[assigned],
        minlength=len(detector_map.labels),
    )
    survival = float(weights.sum())
    p_abs = 1.0 - survival
    # Numerical floor: unitary evolution drifts the norm by a few ulp per
    # element application, which must not masquerade as absorption.
    if abs(p_abs) < 1e-13:
        p_abs = 0.0
    probabilities = {label: float(sums[i]) for i, label in enumerate(detector_map.labels)}
    return DetectionDistribution(probabilities, p_abs)
