"""Time evolution and observables.

Two propagation routes are provided:

* :func:`evolve_numeric` integrates i d|psi>/dt = H |psi> (hbar = 1) with the
  classic fourth-order Runge-Kutta scheme on the full Hamiltonian.  No
  renormalization is ever applied; the drift of the squared norm is the
  integrator's accuracy meter and aborts the run when it exceeds a bound.

* :func:`evolve_rwa` expands the initial state over the secular eigenbasis
  (unmixed low manifolds plus the dressed pairs) and attaches the analytic
  phase factors, which is exact within the rotating-wave treatment.

The sampled observables are the population inversion W = <sigma_z>, the
photon-number distribution P_N summed over spin, the squared norm, and the
energy expectation value.  Closed-form inversion curves for the two standard
initial states are available as :func:`inversion_fock` and
:func:`inversion_coherent`.

A single trajectory is integrated sequentially; distinct trajectories are
independent and may run in parallel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fockmath import SPIN_DOWN, SPIN_UP, FockSpace, displaced_fock, laguerre_transition
from .model import HamiltonianMatrix, ModelParams
from .rwa import ResonanceSpec, coupling_element, dressed_pair, low_manifold_states

EXCITED_FOCK = "excited-fock"
GROUND_COHERENT = "ground-coherent"
CUSTOM_VECTOR = "custom-vector"
_KINDS = (EXCITED_FOCK, GROUND_COHERENT, CUSTOM_VECTOR)

#: squared-norm deviation at which a numeric run aborts
DEFAULT_NORM_TOL = 1e-6

#: combined population of the top five photon levels that flags a run invalid
DEFAULT_TRUNCATION_TOL = 1e-8


class NormDriftError(RuntimeError):
    """Squared norm drifted past the configured bound during integration."""


class ProjectionError(RuntimeError):
    """The secular basis fails to represent the initial state."""


class TruncationError(ValueError):
    """The requested state does not fit in the truncated space."""


class IntegratorWarning(UserWarning):
    """Step-size or truncation advisories from the propagators."""


@dataclass
class QuantumState:
    """Complex amplitude vector on the two-level (x) Fock product basis.

    The squared norm is expected to stay within a configured distance of 1;
    the numeric propagator enforces that.
    """

    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 1 or self.amplitudes.size % 2:
            raise ValueError("amplitudes must be a flat vector of even length")

    @property
    def n_max(self) -> int:
        return self.amplitudes.size // 2

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class InitialStateSpec:
    """Declarative initial condition.

    kind "excited-fock": spin up, bare Fock state with ``n_photons`` quanta.
    kind "ground-coherent": spin down, coherent field of mean photon number
    ``mean_photons``.  kind "custom-vector": take ``vector`` (normalized copy).
    """

    kind: str
    n_photons: int = 0
    mean_photons: float = 0.0
    vector: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if self.n_photons < 0:
            raise ValueError("n_photons must be >= 0")
        if not (self.mean_photons >= 0.0):
            raise ValueError("mean_photons must be >= 0")
        if self.kind == CUSTOM_VECTOR and self.vector is None:
            raise ValueError("custom-vector needs an explicit vector")


@dataclass
class Trajectory:
    """Sampled time series of one propagation run.

    ``norm`` stores the squared norm (total probability), so each row of
    ``photon_dist`` sums to the matching ``norm`` entry identically.
    ``truncation_ok`` is cleared when the top five photon levels ever hold
    more than the truncation tolerance.  ``final_state`` carries the
    propagated amplitudes at the last sample, handy for chaining runs or
    convergence studies.
    """

    times: np.ndarray
    inversion: np.ndarray
    photon_dist: np.ndarray
    norm: np.ndarray
    energy: np.ndarray
    truncation_ok: bool = True
    final_state: "QuantumState | None" = None

    def __len__(self) -> int:
        return self.times.size


def observables(psi: QuantumState) -> tuple[float, np.ndarray]:
    """Population inversion W and photon distribution P of a state."""
    w, p = _w_and_p(psi.amplitudes, psi.n_max)
    return w, p


def _w_and_p(amplitudes: np.ndarray, n_max: int) -> tuple[float, np.ndarray]:
    down = np.abs(amplitudes[:n_max]) ** 2
    up = np.abs(amplitudes[n_max:]) ** 2
    return float(np.sum(up) - np.sum(down)), down + up


def prepare_initial(spec: InitialStateSpec, params: ModelParams, space: FockSpace) -> QuantumState:
    """Build the normalized initial amplitude vector for a scenario.

    The coherent field state is the displaced vacuum D(-sqrt(mean_photons))|0>;
    the displacement points opposite to the down-branch well so the standard
    weight argument (sqrt(mean_photons) + lambda_g/omega)**2 applies, and the
    photon marginal is Poisson with mean ``mean_photons`` either way.
    """
    vec = np.zeros(space.dim, dtype=complex)
    if spec.kind == EXCITED_FOCK:
        if spec.n_photons >= space.n_max:
            raise TruncationError(
                f"Fock level {spec.n_photons} outside truncation 0..{space.n_max - 1}"
            )
        vec[space.index(SPIN_UP, spec.n_photons)] = 1.0
    elif spec.kind == GROUND_COHERENT:
        nbar = spec.mean_photons
        if nbar + 5.0 * math.sqrt(nbar) > space.n_max:
            raise TruncationError(
                f"coherent state of mean {nbar} needs n_max > "
                f"{nbar + 5.0 * math.sqrt(nbar):.1f}, got {space.n_max}"
            )
        vec[space.block(SPIN_DOWN)] = displaced_fock(0, -math.sqrt(nbar), space)
    else:
        given = np.asarray(spec.vector, dtype=complex)
        if given.shape != (space.dim,):
            raise ValueError(f"custom vector must have length {space.dim}, got {given.shape}")
        nrm = np.linalg.norm(given)
        if nrm == 0.0:
            raise ValueError("custom vector must be nonzero")
        vec = given / nrm
    return QuantumState(vec, time=0.0)


def _spectral_radius_estimate(h: np.ndarray) -> float:
    # Gershgorin bound; cheap and safe for the step-size advisory
    return float(np.max(np.sum(np.abs(h), axis=1)))


def evolve_numeric(
    H: HamiltonianMatrix,
    psi0: QuantumState,
    t_end: float,
    dt: float,
    sample_every: int = 1,
    *,
    norm_tol: float = DEFAULT_NORM_TOL,
    truncation_tol: float = DEFAULT_TRUNCATION_TOL,
) -> Trajectory:
    """Integrate the Schroedinger equation with classic RK4 for a duration t_end.

    Observables are sampled at step 0, every ``sample_every`` steps, and at
    the final step.  The squared norm is never renormalized; if it deviates
    from 1 by more than ``norm_tol`` the run aborts with a step-size hint.
    The run is flagged invalid (``truncation_ok = False``) if the top five
    photon levels ever accumulate more than ``truncation_tol`` population.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if t_end <= 0:
        raise ValueError(f"t_end must be > 0, got {t_end}")
    if sample_every < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    h = H.matrix
    if psi0.amplitudes.size != h.shape[0]:
        raise ValueError("state and Hamiltonian dimensions disagree")

    radius = _spectral_radius_estimate(h)
    if radius > 0 and dt > 0.05 / radius:
        warnings.warn(
            f"dt = {dt:.3g} exceeds the recommended 0.05/spectral radius "
            f"= {0.05 / radius:.3g}; accuracy rests on the populated subspace "
            "staying low in the spectrum",
            IntegratorWarning,
            stacklevel=2,
        )

    n_steps = max(1, int(round(t_end / dt)))
    n_max = H.space.n_max
    a = -1j * h  # generator of i dpsi/dt = H psi

    psi = psi0.amplitudes.astype(complex).copy()
    times, inversions, dists, norms, energies = [], [], [], [], []
    truncation_ok = True
    warned_truncation = False

    def sample(step: int) -> None:
        nonlocal truncation_ok, warned_truncation
        t = psi0.time + step * dt
        w, p = _w_and_p(psi, n_max)
        nrm = float(np.sum(p))
        if abs(nrm - 1.0) > norm_tol:
            raise NormDriftError(
                f"|psi|^2 deviated from 1 by {abs(nrm - 1.0):.3e} at t = {t:.6g} "
                f"(bound {norm_tol:.1e}); halve the step, e.g. dt = {dt / 2:.6g}"
            )
        if float(np.sum(p[-5:])) >= truncation_tol:
            truncation_ok = False
            if not warned_truncation:
                warned_truncation = True
                warnings.warn(
                    f"top five photon levels reached {float(np.sum(p[-5:])):.3e} "
                    f"population at t = {t:.6g}; raise n_max",
                    IntegratorWarning,
                    stacklevel=3,
                )
        energy = float(np.real(np.vdot(psi, h @ psi)))
        times.append(t)
        inversions.append(w)
        dists.append(p)
        norms.append(nrm)
        energies.append(energy)

    sample(0)
    for step in range(1, n_steps + 1):
        k1 = a @ psi
        k2 = a @ (psi + (0.5 * dt) * k1)
        k3 = a @ (psi + (0.5 * dt) * k2)
        k4 = a @ (psi + dt * k3)
        psi += (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if step % sample_every == 0 or step == n_steps:
            sample(step)

    return Trajectory(
        times=np.array(times),
        inversion=np.array(inversions),
        photon_dist=np.array(dists),
        norm=np.array(norms),
        energy=np.array(energies),
        truncation_ok=truncation_ok,
        final_state=QuantumState(psi.copy(), time=psi0.time + n_steps * dt),
    )


def _rwa_basis(
    params: ModelParams, spec: ResonanceSpec, space: FockSpace
) -> tuple[np.ndarray, np.ndarray]:
    """Secular eigenbasis as columns on the product space, with energies.

    Covers the unmixed manifolds N < n and the dressed pairs for
    n <= N <= n_max-1.  The top n up-branch displaced states have no manifold
    partner inside the truncation and are not representable; initial states
    must not lean on them (checked by the caller).
    """
    n = spec.n
    n_max = space.n_max
    g = params.lambda_g / params.omega
    e = params.lambda_e / params.omega
    dn = space.block(SPIN_DOWN)
    up = space.block(SPIN_UP)

    down_vecs = np.column_stack([displaced_fock(k, g, space) for k in range(n_max)])
    up_vecs = np.column_stack([displaced_fock(k, -e, space) for k in range(n_max - n)])

    n_states = n + 2 * (n_max - n)
    basis = np.zeros((space.dim, n_states), dtype=complex)
    energies = np.zeros(n_states)

    col = 0
    for vec, energy in low_manifold_states(params, spec, space):
        basis[:, col] = vec
        energies[col] = energy
        col += 1
    for n_manifold in range(n, n_max):
        for state in dressed_pair(params, spec, n_manifold):
            basis[dn, col] = state.c_down * down_vecs[:, n_manifold]
            basis[up, col] = state.c_up * up_vecs[:, n_manifold - n]
            energies[col] = state.energy
            col += 1
    return basis, energies


def evolve_rwa(
    params: ModelParams,
    spec: ResonanceSpec,
    psi0: QuantumState,
    t_grid: np.ndarray,
    *,
    completeness_tol: float = 1e-6,
    truncation_tol: float = DEFAULT_TRUNCATION_TOL,
) -> Trajectory:
    """Analytic secular evolution sampled on an explicit time grid.

    The initial state is projected on the secular eigenbasis; a
    :class:`ProjectionError` is raised when the captured weight falls below
    ``1 - completeness_tol`` (truncation too tight, or the state leans on the
    few top-of-space levels the secular basis cannot represent).  The energy
    series is the basis-weighted mean, which is constant by construction.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d array")
    space = FockSpace(psi0.n_max)
    basis, energies = _rwa_basis(params, spec, space)

    coeffs = basis.conj().T @ psi0.amplitudes
    captured = float(np.sum(np.abs(coeffs) ** 2))
    total = psi0.norm_sq()
    if captured < total * (1.0 - completeness_tol):
        raise ProjectionError(
            f"secular basis captures only {captured / total:.8f} of the state; "
            "raise n_max or reconsider the initial state"
        )

    phases = np.exp(-1j * np.outer(energies, t_grid - psi0.time))
    psi_t = basis @ (coeffs[:, None] * phases)  # (dim, T)

    n_max = space.n_max
    down = np.abs(psi_t[:n_max, :]) ** 2
    up = np.abs(psi_t[n_max:, :]) ** 2
    dist = (down + up).T
    inversion = np.sum(up, axis=0) - np.sum(down, axis=0)
    norm = np.sum(dist, axis=1)
    energy_mean = float(np.real(np.sum(np.abs(coeffs) ** 2 * energies)))

    truncation_ok = bool(np.max(np.sum(dist[:, -5:], axis=1)) < truncation_tol)
    return Trajectory(
        times=t_grid.copy(),
        inversion=inversion,
        photon_dist=dist,
        norm=norm,
        energy=np.full(t_grid.size, energy_mean),
        truncation_ok=truncation_ok,
        final_state=QuantumState(psi_t[:, -1].copy(), time=float(t_grid[-1])),
    )


def _series_weights(first_arg: float, weight_tol: float):
    """Yield (N, weight) for weights I(N, 0, first_arg)^2 until the cumulative
    weight exceeds 1 - weight_tol."""
    cum = 0.0
    n_photon = 0
    while cum < 1.0 - weight_tol:
        if n_photon > 100_000:  # defensive; weights sum to 1 analytically
            raise RuntimeError("weight series failed to converge")
        w = laguerre_transition(n_photon, 0, first_arg) ** 2
        cum += w
        yield n_photon, w
        n_photon += 1


def inversion_fock(params: ModelParams, n: int, t, *, weight_tol: float = 1e-10):
    """Closed-form inversion W_n(t) for the initial state |up, vacuum> at exact
    n-photon resonance.

    W_n(t) = sum_N I(N, 0, (lambda_e/omega)**2)^2 cos(Omega_{N+n}(n) t).

    The series is truncated once the cumulative weight reaches
    ``1 - weight_tol``.  ``t`` may be a scalar or an array.
    """
    if n < 1:
        raise ValueError(f"photon order must be >= 1, got {n}")
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    e2 = (params.lambda_e / params.omega) ** 2
    for n_photon, w in _series_weights(e2, weight_tol):
        omega_r = 2.0 * abs(coupling_element(params, n_photon + n, n))
        out = out + w * np.cos(omega_r * t)
    return out if out.ndim else float(out)


def inversion_coherent(
    params: ModelParams, n: int, mean_photons: float, t, *, weight_tol: float = 1e-10
):
    """Closed-form inversion for |down, coherent(mean_photons)> at exact
    n-photon resonance.

    W_n(t) = -1 + 2 sum_{N >= n} I(N, 0, rho)^2 sin^2(Omega_N(n) t / 2)

    with rho = (sqrt(mean_photons) + lambda_g/omega)**2, matching the
    coherent-state convention of :func:`prepare_initial`.  The constant -1
    already carries the time-independent weight of the unmixed manifolds
    N < n, so the sum starts at N = n with no extra offset.
    """
    if n < 1:
        raise ValueError(f"photon order must be >= 1, got {n}")
    if not (mean_photons >= 0.0):
        raise ValueError("mean_photons must be >= 0")
    t = np.asarray(t, dtype=float)
    out = np.full_like(t, -1.0)
    rho = (math.sqrt(mean_photons) + params.lambda_g / params.omega) ** 2
    for n_photon, w in _series_weights(rho, weight_tol):
        if n_photon < n:
            continue
        omega_r = 2.0 * abs(coupling_element(params, n_photon, n))
        out = out + 2.0 * w * np.sin(0.5 * omega_r * t) ** 2
    return out if out.ndim else float(out)
