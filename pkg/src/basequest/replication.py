"""Damped base-selection scenario on a joint (base x energy-quanta) space.

The joint register holds one amplitude per (base object, quanta label)
pair, quanta labels 0 and 2: column 0 of the (dim, 2) amplitude array is
the no-emission sector, column 1 the two-quanta sector. A selection round
is: relaxed uniform start, an entangling query that swaps the target's
quanta sector with a sign, one pendulum swing of amplification, then a
projective check for emitted quanta, restarting on failure.

The swing between the post-query state and its amplified image is modeled
two ways, differing only in the far endpoint of a great-circle arc:

* "joint" applies the amplification reflection to the base register of the
  full entangled state. Its endpoint stays entangled (the reflection is
  local to the base factor), so this reading feeds the reported
  entanglement-entropy series.
* "conditional" lets the base register follow the plain one-query search
  arc and keeps the quanta label slaved to whether the base is the target
  (a linear isometric lift of the base arc). At dim 4 its endpoint is
  exactly the fully emitted target state, which is what the emission
  statistics assume; this reading is the default for success probabilities.

Relaxation toward the uniform no-emission state is an exponential mix with
rate 2/relaxation_time applied to the pure swing state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DimensionMismatchError,
    DrawBudgetExceededError,
    InvalidDimensionError,
    InvalidParameterError,
    InvalidTargetError,
)

HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
NORM_ATOL = 1e-12

# Probability mass below which a measurement branch has no defined
# post-state.
BRANCH_ATOL = 1e-15

# Arc angles this close to 0 or pi fall back to a pure-phase path. acos
# rounding keeps sin(angle) above ~2e-8 for any overlap one ulp inside
# +-1, so the cutoff must clear that floor or exactly (anti)parallel
# endpoint pairs hit the slerp branch and cancel to a zero vector.
DEGENERATE_SIN = 1e-6

# Each timescale must exceed the faster one by at least this factor for
# the scenario separation of scales to hold.
MIN_TIMESCALE_RATIO = 10.0

QUANTA_LABELS = (0, 2)

TRAJECTORIES = ("conditional", "joint")


class EmissionPolicy(str, Enum):
    AT_EXTREMUM = "extremum"
    UNIFORM_RANDOM = "uniform"
    FIXED_TIME = "fixed"


class HierarchyWarning(UserWarning):
    """Scenario timescales are not cleanly separated."""


@dataclass(frozen=True)
class ScenarioParams:
    """Inputs for one selection-scenario run.

    bond_duration, oscillation_time and relaxation_time share one (unit
    free) time axis; oscillation_time is the time from the start of a
    swing to its far turning point, so one full period is twice that.
    relaxation_time may be math.inf for the undamped limit.
    """

    dim: int
    target: int
    bond_duration: float
    oscillation_time: float
    relaxation_time: float
    emission: EmissionPolicy = EmissionPolicy.AT_EXTREMUM
    emission_time: float | None = None
    samples: int = 1000
    seed: int | None = None

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 2:
            raise InvalidDimensionError(
                f"dim must be an integer >= 2, got {self.dim!r}")
        if not isinstance(self.target, int) or not 0 <= self.target < self.dim:
            raise InvalidTargetError(
                f"target must be an integer in [0, {self.dim}), got {self.target!r}")
        for name in ("bond_duration", "oscillation_time", "relaxation_time"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidParameterError(f"{name} must be > 0, got {value!r}")
        object.__setattr__(self, "emission", EmissionPolicy(self.emission))
        if self.emission is EmissionPolicy.FIXED_TIME:
            if self.emission_time is None or not self.emission_time >= 0:
                raise InvalidParameterError(
                    "fixed-time emission needs emission_time >= 0, got "
                    f"{self.emission_time!r}")
        if not isinstance(self.samples, int) or self.samples < 1:
            raise InvalidParameterError(
                f"samples must be an integer >= 1, got {self.samples!r}")


def hierarchy_warnings(params: ScenarioParams) -> tuple[str, ...]:
    """Messages for every timescale ratio below MIN_TIMESCALE_RATIO."""
    notes = []
    ratio = params.oscillation_time / params.bond_duration
    if not ratio >= MIN_TIMESCALE_RATIO:
        notes.append(
            f"oscillation_time/bond_duration = {ratio:.3g} is below "
            f"{MIN_TIMESCALE_RATIO}; the kick is not fast against the swing")
    ratio = params.relaxation_time / params.oscillation_time
    if not ratio >= MIN_TIMESCALE_RATIO:
        notes.append(
            f"relaxation_time/oscillation_time = {ratio:.3g} is below "
            f"{MIN_TIMESCALE_RATIO}; damping competes with the swing")
    return tuple(notes)


@dataclass(frozen=True, eq=False)
class JointState:
    """Normalized pure state on the joint register.

    amplitudes has shape (dim, 2): column 0 is the quanta-0 sector,
    column 1 the quanta-2 sector.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] < 2:
            raise InvalidDimensionError(
                f"joint state needs shape (dim >= 2, 2), got {amps.shape}")
        # pairwise-summed squares avoid the BLAS norm's length-proportional drift
        norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)))
        if abs(norm - 1.0) > NORM_ATOL:
            raise InvalidParameterError(
                f"joint state norm {norm!r} deviates from 1 by more than {NORM_ATOL}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def flat(self) -> np.ndarray:
        """Row-major flattening: joint index 2*base + quanta_column."""
        return self.amplitudes.ravel()

    def base_density(self) -> np.ndarray:
        """Reduced density matrix of the base register (quanta traced out)."""
        return self.amplitudes @ self.amplitudes.conj().T

    def quanta_density(self) -> np.ndarray:
        """Reduced density matrix of the quanta register (base traced out)."""
        return self.amplitudes.T @ self.amplitudes.conj()


def relaxed_start(dim: int) -> JointState:
    """Uniform base amplitudes, all in the no-emission sector."""
    if not isinstance(dim, int) or dim < 2:
        raise InvalidDimensionError(f"dim must be an integer >= 2, got {dim!r}")
    amps = np.zeros((dim, 2), dtype=np.complex128)
    amps[:, 0] = 1.0 / math.sqrt(dim)
    return JointState(amps)


def entangling_oracle(state: JointState, target: int) -> JointState:
    """Signed quanta swap on the target row; everything else untouched.

    Sends (target, 0) to -(target, 2) and (target, 2) to -(target, 0), so
    applying it twice is the identity.
    """
    if not 0 <= target < state.dim:
        raise InvalidTargetError(
            f"target must be in [0, {state.dim}), got {target!r}")
    amps = state.amplitudes.copy()
    amps[target, 0], amps[target, 1] = -state.amplitudes[target, 1], \
        -state.amplitudes[target, 0]
    return JointState(amps)


def base_amplification(state: JointState) -> JointState:
    """Negated reflection about uniform, applied to the base register only.

    Column by column: each quanta sector maps to twice its mean minus
    itself. Local to the base factor, so it cannot change entanglement
    across the base/quanta cut.
    """
    amps = state.amplitudes
    return JointState(2.0 * amps.mean(axis=0, keepdims=True) - amps)


def conditional_lift(base_amplitudes: np.ndarray, target: int) -> JointState:
    """Embed a base-register state with the quanta label slaved to the
    base: target amplitude rides in the quanta-2 sector, the rest in the
    quanta-0 sector."""
    base = np.asarray(base_amplitudes, dtype=np.complex128)
    if base.ndim != 1 or base.size < 2:
        raise InvalidDimensionError(
            f"base state needs at least 2 amplitudes, got shape {base.shape}")
    if not 0 <= target < base.size:
        raise InvalidTargetError(
            f"target must be in [0, {base.size}), got {target!r}")
    amps = np.zeros((base.size, 2), dtype=np.complex128)
    amps[:, 0] = base
    amps[target, 1] = base[target]
    amps[target, 0] = 0.0
    return JointState(amps)


def _conditional_base(state: JointState, target: int) -> np.ndarray:
    """Inverse of conditional_lift; rejects states not in lifted form."""
    amps = state.amplitudes
    stray = max(
        float(abs(amps[target, 0])),
        float(np.max(np.abs(np.delete(amps[:, 1], target)))),
    )
    if stray > 1e-12:
        raise InvalidParameterError(
            "state is not conditionally lifted: off-pattern amplitude "
            f"{stray!r} exceeds 1e-12")
    base = amps[:, 0].copy()
    base[target] = amps[target, 1]
    return base


def swing_endpoint(state0: JointState, target: int,
                   trajectory: str = "conditional") -> JointState:
    """Far turning point of the amplification swing from state0."""
    _check_trajectory(trajectory)
    if trajectory == "joint":
        return base_amplification(state0)
    base0 = _conditional_base(state0, target)
    base1 = 2.0 * base0.mean() - base0
    return conditional_lift(base1, target)


def _check_trajectory(trajectory: str) -> None:
    if trajectory not in TRAJECTORIES:
        raise InvalidParameterError(
            f"trajectory must be one of {TRAJECTORIES}, got {trajectory!r}")


def oscillation_fraction(t: float, oscillation_time: float) -> float:
    """Pendulum progress along the arc: 0 at rest, 1 at the far turning
    point, back to 0 after a full period of twice oscillation_time."""
    if t < 0:
        raise InvalidParameterError(f"time must be >= 0, got {t!r}")
    return (1.0 - math.cos(math.pi * t / oscillation_time)) / 2.0


def _arc_interpolate(flat0: np.ndarray, flat1: np.ndarray, fraction: float) -> np.ndarray:
    """Great-circle interpolation between two unit vectors.

    The arc angle comes from the real part of the overlap, which keeps the
    interpolant exactly normalized for any pair of unit vectors. Nearly
    parallel or antiparallel endpoints degrade to a pure-phase path.
    """
    overlap = max(-1.0, min(1.0, float(np.real(np.vdot(flat0, flat1)))))
    angle = math.acos(overlap)
    if math.sin(angle) < DEGENERATE_SIN:
        # snap to an exact end of the range so the phase factor at
        # fraction 1 is +-1 up to one rounding, not up to acos noise
        angle = 0.0 if overlap > 0.0 else math.pi
        return np.exp(1j * angle * fraction) * flat0
    return (math.sin((1.0 - fraction) * angle) * flat0
            + math.sin(fraction * angle) * flat1) / math.sin(angle)


def undamped_state(state0: JointState, target: int, oscillation_time: float,
                   t: float, trajectory: str = "conditional") -> JointState:
    """Pure swing state at time t (no relaxation)."""
    if not oscillation_time > 0:
        raise InvalidParameterError(
            f"oscillation_time must be > 0, got {oscillation_time!r}")
    state1 = swing_endpoint(state0, target, trajectory)
    f = oscillation_fraction(t, oscillation_time)
    flat = _arc_interpolate(state0.flat(), state1.flat(), f)
    return JointState(flat.reshape(state0.dim, 2))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density operator on the flattened joint register."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidDimensionError(
                f"density matrix must be square, got shape {mat.shape}")
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > HERMITICITY_ATOL:
            raise InvalidParameterError(
                f"hermiticity defect {herm!r} exceeds {HERMITICITY_ATOL}")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > TRACE_ATOL:
            raise InvalidParameterError(
                f"trace {trace!r} deviates from 1 by more than {TRACE_ATOL}")
        low = float(np.linalg.eigvalsh(mat).min())
        if low < EIGENVALUE_FLOOR:
            raise InvalidParameterError(
                f"minimum eigenvalue {low!r} is below {EIGENVALUE_FLOOR}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_pure(cls, state: JointState) -> "DensityMatrix":
        flat = state.flat()
        return cls(np.outer(flat, flat.conj()))

    def diagnostics(self) -> tuple[float, float, float]:
        """(hermiticity defect, trace defect, minimum eigenvalue)."""
        mat = self.matrix
        return (
            float(np.max(np.abs(mat - mat.conj().T))),
            float(abs(np.trace(mat) - 1.0)),
            float(np.linalg.eigvalsh(mat).min()),
        )


def damping_weight(t: float, relaxation_time: float) -> float:
    """Surviving pure-swing weight exp(-2 t / relaxation_time)."""
    if t < 0:
        raise InvalidParameterError(f"time must be >= 0, got {t!r}")
    if not relaxation_time > 0:
        raise InvalidParameterError(
            f"relaxation_time must be > 0, got {relaxation_time!r}")
    return math.exp(-2.0 * t / relaxation_time)


def damped_oscillation(state0: JointState, params: ScenarioParams, t: float,
                       trajectory: str = "conditional") -> DensityMatrix:
    """Density operator of the damped swing at time t.

    Exponential mix of the pure swing state with the relaxed uniform
    no-emission state: weight exp(-2 t / relaxation_time) on the former.
    """
    if state0.dim != params.dim:
        raise DimensionMismatchError(
            f"state dim {state0.dim} differs from params dim {params.dim}")
    psi = undamped_state(state0, params.target, params.oscillation_time, t,
                         trajectory).flat()
    weight = damping_weight(t, params.relaxation_time)
    eq = relaxed_start(params.dim).flat()
    rho = (weight * np.outer(psi, psi.conj())
           + (1.0 - weight) * np.outer(eq, eq.conj()))
    return DensityMatrix(rho)


@dataclass(frozen=True)
class EmissionResult:
    """Projective check for emitted quanta on the target row.

    post_success / post_failure are None when the corresponding branch has
    (numerically) no probability mass, leaving its post-state undefined.
    """

    success_probability: float
    post_success: DensityMatrix | None
    post_failure: DensityMatrix | None


def emission_measurement(rho: DensityMatrix, target: int) -> EmissionResult:
    """Measure the projector onto |target, quanta 2>."""
    side = rho.matrix.shape[0]
    if side % 2 != 0:
        raise InvalidDimensionError(
            f"expected a flattened (dim, 2) register, got side {side}")
    dim = side // 2
    if not 0 <= target < dim:
        raise InvalidTargetError(f"target must be in [0, {dim}), got {target!r}")
    idx = 2 * target + 1
    p = float(np.real(rho.matrix[idx, idx]))
    p = min(1.0, max(0.0, p))

    post_success = None
    if p > BRANCH_ATOL:
        mat = np.zeros_like(rho.matrix)
        mat[idx, idx] = 1.0
        post_success = DensityMatrix(mat)

    post_failure = None
    if 1.0 - p > BRANCH_ATOL:
        mat = np.array(rho.matrix)
        mat[idx, :] = 0.0
        mat[:, idx] = 0.0
        post_failure = DensityMatrix(mat / (1.0 - p))

    return EmissionResult(success_probability=p, post_success=post_success,
                          post_failure=post_failure)


def entanglement_entropy(state: JointState) -> float:
    """Entropy (bits) of either reduced register of the pure joint state.

    Computed from the singular values of the (dim, 2) amplitude array; the
    base and quanta reductions share the same nonzero spectrum, so one
    number serves both sides of the cut.
    """
    lam = np.linalg.svd(state.amplitudes, compute_uv=False) ** 2
    lam = lam[lam > 1e-15]
    return float(-(lam * np.log2(lam)).sum())


def success_probability_at(state0: JointState, params: ScenarioParams,
                           t: float, trajectory: str = "conditional") -> float:
    """Emission success probability of the damped state at time t.

    Uses the closed form: the relaxed component carries no emitted-quanta
    amplitude, so only the pure swing term contributes.
    """
    psi = undamped_state(state0, params.target, params.oscillation_time, t,
                         trajectory)
    amp = psi.amplitudes[params.target, 1]
    return damping_weight(t, params.relaxation_time) * float(abs(amp) ** 2)


def sample_emission_time(policy: EmissionPolicy, oscillation_time: float,
                         rng: np.random.Generator,
                         fixed_time: float | None = None) -> float:
    """One emission time under the given policy (uniform draws cover one
    full period)."""
    policy = EmissionPolicy(policy)
    if policy is EmissionPolicy.AT_EXTREMUM:
        return oscillation_time
    if policy is EmissionPolicy.UNIFORM_RANDOM:
        return float(rng.random() * 2.0 * oscillation_time)
    if fixed_time is None or fixed_time < 0:
        raise InvalidParameterError(
            f"fixed-time emission needs a time >= 0, got {fixed_time!r}")
    return fixed_time


@dataclass(frozen=True)
class ScenarioReport:
    """Outputs of run_scenario; entropy arrays follow the joint reading."""

    params: ScenarioParams
    mean_success: float
    extremum_success_undamped: float
    extremum_success_damped: float
    mean_attempts: float
    max_attempts_observed: int
    entropy_times: np.ndarray
    entropy_bits: np.ndarray
    entropy_at_extremum: float
    warnings: tuple[str, ...]


def run_scenario(params: ScenarioParams, *, entropy_points: int = 101,
                 attempt_cap: int = 100000) -> ScenarioReport:
    """Full selection scenario: kick, swing, emission checks with restarts.

    Per sample, emission times are drawn under the policy and the emitted
    quanta are checked; a failed check restarts the whole round (drawing a
    fresh time), and the number of attempts until first success is
    recorded. mean_success averages the analytic success probability over
    each sample's first drawn time; attempt counts come from Bernoulli
    draws. Sample k draws from SeedSequence child k of the master seed, so
    any parallel schedule over samples reproduces the serial results.

    The entropy series tracks the undamped joint-reading swing over one
    full period on an entropy_points grid.
    """
    if entropy_points < 2:
        raise InvalidParameterError(
            f"entropy_points must be >= 2, got {entropy_points!r}")
    notes = hierarchy_warnings(params)
    for note in notes:
        warnings.warn(note, HierarchyWarning, stacklevel=2)

    state0 = entangling_oracle(relaxed_start(params.dim), params.target)

    first_probs = np.empty(params.samples)
    attempts = np.empty(params.samples, dtype=np.int64)
    streams = np.random.SeedSequence(params.seed).spawn(params.samples)
    for k, stream in enumerate(streams):
        rng = np.random.Generator(np.random.PCG64(stream))
        count = 0
        while True:
            t = sample_emission_time(params.emission, params.oscillation_time,
                                     rng, params.emission_time)
            p = success_probability_at(state0, params, t)
            if count == 0:
                first_probs[k] = p
            count += 1
            if rng.random() < p:
                break
            if count >= attempt_cap:
                raise DrawBudgetExceededError(
                    f"sample {k} exceeded {attempt_cap} emission attempts "
                    f"(success probability {p!r})")
        attempts[k] = count

    times = np.linspace(0.0, 2.0 * params.oscillation_time, entropy_points)
    bits = np.array([
        entanglement_entropy(undamped_state(
            state0, params.target, params.oscillation_time, t, "joint"))
        for t in times
    ])
    extremum_state = undamped_state(state0, params.target,
                                    params.oscillation_time,
                                    params.oscillation_time, "joint")

    p_undamped = float(abs(undamped_state(
        state0, params.target, params.oscillation_time,
        params.oscillation_time).amplitudes[params.target, 1]) ** 2)
    p_damped = (damping_weight(params.oscillation_time, params.relaxation_time)
                * p_undamped)

    return ScenarioReport(
        params=params,
        mean_success=float(first_probs.mean()),
        extremum_success_undamped=p_undamped,
        extremum_success_damped=p_damped,
        mean_attempts=float(attempts.mean()),
        max_attempts_observed=int(attempts.max()),
        entropy_times=times,
        entropy_bits=bits,
        entropy_at_extremum=entanglement_entropy(extremum_state),
        warnings=notes,
    )
