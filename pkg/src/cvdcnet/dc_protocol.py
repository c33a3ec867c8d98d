"""Dense-coding protocol: encoding, decoding, channel, capacity.

Protocol shape for an N-mode network: N-1 senders each hold one mode of
the resource (modes 0..N-2), the receiver holds mode N-1 plus, after
transmission, every sender mode. The senders displace their modes to
carry N real message components in total: the first sender modulates both
quadratures of mode 0, each further sender modulates a single quadrature,
alternating momentum/position down the line. The receiver undoes the
beam-splitter chain and homodynes one quadrature per mode.

Because decoding inverts the preparation chain, the decoded covariance is
the product of the original single-mode squeezed vacua. Measuring each
mode's squeezed quadrature turns the protocol into a linear Gaussian
channel beta = M alpha + xi with independent noise of variance
e^{-2r}/2 on every output, for which the mutual information is

    I = (1/2) ln det(I + Sigma_noise^{-1} M Sigma_msg M^T).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np
from numpy.linalg import LinAlgError
from scipy.linalg import solve_triangular

from .phase_space import (
    GaussianState,
    Quadrature,
    QuadratureSelection,
    SymplecticTransform,
    apply_symplectic,
    beam_splitter,
)
from .resource_prep import ResourceSpec, alternating_pattern

__all__ = [
    "EncodingPlan",
    "LinearGaussianChannel",
    "CapacityReport",
    "OptimalParams",
    "MCEstimate",
    "message_density",
    "encoding_matrix",
    "encode",
    "decoding_symplectic",
    "decode_transform",
    "decoded_quadrature_variances",
    "build_channel",
    "mutual_information",
    "mutual_information_mc",
    "photon_constraint",
    "optimal_params",
    "capacity",
    "channel_matrix_batch",
]

MC_MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class EncodingPlan:
    """Which (mode, quadrature) slots carry the message, and how loudly.

    components lists one slot per real message component, in message
    order. A valid plan for an n-mode network has exactly n components,
    all on sender modes 0..n-2 (the receiver's mode encodes nothing),
    with no slot used twice. sigma_msg > 0 sets the modulation scale:
    each component is drawn from a centered normal of variance
    sigma_msg^2 / 2.
    """

    n_modes: int
    sigma_msg: float
    components: tuple[tuple[int, Quadrature], ...]

    def __post_init__(self):
        n = int(self.n_modes)
        if n < 2:
            raise ValueError(f"need at least two modes, got {n}")
        sigma = float(self.sigma_msg)
        if not np.isfinite(sigma) or sigma <= 0.0:
            raise ValueError(f"sigma_msg must be finite and > 0, got {sigma}")
        comps = tuple((int(m), q) for m, q in self.components)
        if len(comps) != n:
            raise ValueError(
                f"{n}-mode plan needs exactly {n} message components, got {len(comps)}"
            )
        for m, q in comps:
            if not isinstance(q, Quadrature):
                raise TypeError(f"not a Quadrature: {q!r}")
            if not 0 <= m <= n - 2:
                raise ValueError(
                    f"component on mode {m}: senders hold modes 0..{n - 2} only"
                )
        if len(set(comps)) != len(comps):
            raise ValueError("a (mode, quadrature) slot is used twice")
        object.__setattr__(self, "n_modes", n)
        object.__setattr__(self, "sigma_msg", sigma)
        object.__setattr__(self, "components", comps)

    @classmethod
    def standard(cls, n_modes: int, sigma_msg: float) -> "EncodingPlan":
        """The canonical plan: mode 0 carries both quadratures, mode k
        (1 <= k <= n-2) carries momentum for odd k, position for even k."""
        comps = [(0, Quadrature.POSITION), (0, Quadrature.MOMENTUM)]
        for k in range(1, n_modes - 1):
            comps.append((k, Quadrature.MOMENTUM if k % 2 else Quadrature.POSITION))
        return cls(n_modes, sigma_msg, tuple(comps))


def message_density(plan: EncodingPlan, alpha) -> float:
    """Probability density of a message vector under the plan's prior.

    The prior is an isotropic centered normal with variance
    sigma_msg^2 / 2 per component:
    p(alpha) = (pi sigma^2)^(-n/2) exp(-|alpha|^2 / sigma^2).
    """
    a = np.asarray(alpha, dtype=float)
    n = len(plan.components)
    if a.shape != (n,):
        raise ValueError(f"message shape {a.shape}, expected ({n},)")
    var = plan.sigma_msg**2
    return float(np.exp(-np.dot(a, a) / var) / (np.pi * var) ** (n / 2))


def encoding_matrix(plan: EncodingPlan) -> np.ndarray:
    """Map message components to displacement shifts: one column per
    component, carrying sqrt(2) at the targeted flat quadrature index."""
    n = plan.n_modes
    e = np.zeros((2 * n, len(plan.components)))
    for col, (m, q) in enumerate(plan.components):
        e[2 * m + (q is Quadrature.MOMENTUM), col] = np.sqrt(2.0)
    return e


def encode(state: GaussianState, plan: EncodingPlan, alpha) -> GaussianState:
    """Displace the sender modes to imprint a message vector.

    Equivalent to one displace() per component with amplitude alpha_j
    (real for position slots, imaginary for momentum slots); the
    covariance is untouched.
    """
    if state.n_modes != plan.n_modes:
        raise ValueError(
            f"state has {state.n_modes} modes, plan expects {plan.n_modes}"
        )
    a = np.asarray(alpha, dtype=float)
    if a.shape != (len(plan.components),):
        raise ValueError(f"message shape {a.shape}, expected ({len(plan.components)},)")
    return GaussianState(
        state.n_modes,
        state.displacement + encoding_matrix(plan) @ a,
        state.covariance,
    )


def decoding_symplectic(n_modes: int, taus: Sequence[float]) -> SymplecticTransform:
    """The receiver's transform: adjoint beam-splitter chain, then a sign
    flip of both quadratures on modes 1..n-1.

    The chain adjoint alone inverts the preparation network; the extra
    flip (a pi phase-space rotation, i.e. the receiver's choice of local
    oscillator phase per mode) aligns the measured quadratures so every
    message component appears with a positive coefficient. It negates
    whole rows of the channel matrix, so capacities do not depend on it.
    """
    taus = tuple(float(t) for t in taus)
    if len(taus) != n_modes - 1:
        raise ValueError(f"{n_modes}-mode chain needs {n_modes - 1} transmissivities")
    s = np.eye(2 * n_modes)
    for k, tau in enumerate(taus):
        s = s @ beam_splitter(n_modes, k, k + 1, tau).matrix.T
    s[2:, :] *= -1.0
    return SymplecticTransform(n_modes, s)


def decode_transform(state: GaussianState, taus: Sequence[float]) -> GaussianState:
    """Run the receiver's decoding network on a state."""
    return apply_symplectic(state, decoding_symplectic(state.n_modes, taus))


def decoded_quadrature_variances(n_modes: int, r: float) -> np.ndarray:
    """Diagonal of the decoded resource covariance, exactly.

    Decoding inverts the chain, so the decoded resource is the original
    product of squeezed vacua: variance e^{-2r}/2 on each mode's squeezed
    quadrature (alternating pattern), e^{2r}/2 on its conjugate. Computed
    in closed form because the numerically decoded covariance loses the
    small variances to e^{2r}-scale cancellation once r >~ 15.
    """
    v = np.empty(2 * n_modes)
    lo = 0.5 * np.exp(-2.0 * r)
    hi = 0.5 * np.exp(2.0 * r)
    for k, choice in enumerate(alternating_pattern(n_modes).choices):
        if choice is Quadrature.MOMENTUM:
            v[2 * k], v[2 * k + 1] = hi, lo
        else:
            v[2 * k], v[2 * k + 1] = lo, hi
    return v


@dataclass(frozen=True)
class LinearGaussianChannel:
    """beta = matrix @ alpha + xi with xi ~ N(0, noise_cov) and the prior
    alpha ~ N(0, msg_cov)."""

    matrix: np.ndarray
    noise_cov: np.ndarray
    msg_cov: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2:
            raise ValueError("channel matrix must be 2-d")
        n_out, n_msg = m.shape
        noise = np.asarray(self.noise_cov, dtype=float)
        msg = np.asarray(self.msg_cov, dtype=float)
        if noise.shape != (n_out, n_out):
            raise ValueError(f"noise_cov shape {noise.shape}, expected {(n_out, n_out)}")
        if msg.shape != (n_msg, n_msg):
            raise ValueError(f"msg_cov shape {msg.shape}, expected {(n_msg, n_msg)}")
        for name, c in (("noise_cov", noise), ("msg_cov", msg)):
            scale = max(1.0, float(np.abs(c).max()))
            if np.abs(c - c.T).max() > 1e-12 * scale:
                raise ValueError(f"{name} is not symmetric")
        try:
            np.linalg.cholesky(noise)
        except LinAlgError as exc:
            raise ValueError("noise_cov must be positive definite") from exc
        if np.linalg.eigvalsh((msg + msg.T) / 2.0).min() < -1e-12:
            raise ValueError("msg_cov must be positive semidefinite")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "noise_cov", _frozen((noise + noise.T) / 2.0))
        object.__setattr__(self, "msg_cov", _frozen((msg + msg.T) / 2.0))

    @property
    def n_outputs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_messages(self) -> int:
        return self.matrix.shape[1]


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


def build_channel(
    spec: ResourceSpec,
    plan: EncodingPlan,
    selection: Optional[QuadratureSelection] = None,
) -> LinearGaussianChannel:
    """Assemble the end-to-end channel for a resource and encoding plan.

    selection picks the measured quadrature per decoded mode; by default
    the minimum-variance (squeezed) one, which for r > 0 is the
    alternating pattern itself. The channel matrix rows are the selected
    rows of S_decode @ E; the noise covariance is the matching diagonal
    of the decoded resource covariance.
    """
    if plan.n_modes != spec.n_modes:
        raise ValueError(
            f"plan expects {plan.n_modes} modes, resource has {spec.n_modes}"
        )
    variances = decoded_quadrature_variances(spec.n_modes, spec.r)
    if selection is None:
        selection = QuadratureSelection(
            tuple(
                Quadrature.MOMENTUM
                if variances[2 * k + 1] <= variances[2 * k]
                else Quadrature.POSITION
                for k in range(spec.n_modes)
            )
        )
    if len(selection) != spec.n_modes:
        raise ValueError(
            f"selection covers {len(selection)} modes, resource has {spec.n_modes}"
        )
    rows = selection.flat_indices()
    sdec = decoding_symplectic(spec.n_modes, spec.taus)
    m = (sdec.matrix @ encoding_matrix(plan))[rows, :]
    noise_cov = np.diag(variances[rows])
    msg_cov = (plan.sigma_msg**2 / 2.0) * np.eye(len(plan.components))
    return LinearGaussianChannel(m, noise_cov, msg_cov)


def mutual_information(channel: LinearGaussianChannel) -> float:
    """Shannon mutual information of the channel in nats.

    I = (1/2) ln det(I + L^{-1} M Sigma_msg M^T L^{-T}) with
    noise_cov = L L^T; the whitened form keeps the determinant
    well-scaled even when noise and signal differ by many orders of
    magnitude. Zero message power gives exactly 0.
    """
    chol = np.linalg.cholesky(channel.noise_cov)
    k = solve_triangular(chol, channel.matrix, lower=True)
    a = k @ channel.msg_cov @ k.T
    sign, logdet = np.linalg.slogdet(np.eye(channel.n_outputs) + a)
    if sign <= 0:
        raise ArithmeticError("information determinant lost positivity")
    return max(0.0, 0.5 * logdet)


class MCEstimate(NamedTuple):
    """Monte Carlo estimate with its standard error (both in nats)."""

    estimate: float
    std_error: float


def mutual_information_mc(
    channel: LinearGaussianChannel, n_samples: int, seed: int
) -> MCEstimate:
    """Estimate the mutual information by direct sampling.

    Averages ln p(beta|alpha) - ln p(beta) over joint draws. The draw
    order is fixed (all messages first, then all noise, one PCG64 stream
    seeded with `seed`) so results are reproducible bit for bit across
    runs for the same channel, sample count and seed.
    """
    if n_samples < MC_MIN_SAMPLES:
        raise ValueError(f"need at least {MC_MIN_SAMPLES} samples, got {n_samples}")
    try:
        msg_chol = np.linalg.cholesky(channel.msg_cov)
    except LinAlgError as exc:
        raise ValueError("msg_cov must be positive definite to sample from") from exc
    noise_chol = np.linalg.cholesky(channel.noise_cov)

    rng = np.random.default_rng(seed)
    alpha = rng.standard_normal((n_samples, channel.n_messages)) @ msg_chol.T
    xi = rng.standard_normal((n_samples, channel.n_outputs)) @ noise_chol.T
    beta = alpha @ channel.matrix.T + xi

    marg_cov = channel.noise_cov + channel.matrix @ channel.msg_cov @ channel.matrix.T
    marg_chol = np.linalg.cholesky(marg_cov)

    # ln p(beta|alpha) - ln p(beta), Gaussian densities with shared 2 pi factors
    white_cond = solve_triangular(noise_chol, xi.T, lower=True)
    white_marg = solve_triangular(marg_chol, beta.T, lower=True)
    quad = 0.5 * (np.sum(white_marg**2, axis=0) - np.sum(white_cond**2, axis=0))
    log_det_ratio = float(
        np.sum(np.log(np.diag(marg_chol))) - np.sum(np.log(np.diag(noise_chol)))
    )
    values = quad + log_det_ratio
    estimate = float(np.mean(values))
    std_error = float(np.std(values, ddof=1) / np.sqrt(n_samples))
    return MCEstimate(estimate, std_error)


def photon_constraint(n_modes: int, r: float, sigma_msg_sq: float) -> float:
    """Mean photon number spent by the senders:

        nbar = (n-1) sinh^2(r) + (n/2) sigma_msg_sq.

    Each of the n-1 sender modes carries sinh^2(r) squeezing photons;
    the n message components add sigma_msg_sq / 2 displacement photons
    apiece on average.
    """
    if n_modes < 2:
        raise ValueError(f"need at least two modes, got {n_modes}")
    if r < 0 or sigma_msg_sq < 0:
        raise ValueError("r and sigma_msg_sq must be >= 0")
    return float((n_modes - 1) * np.sinh(r) ** 2 + n_modes * sigma_msg_sq / 2.0)


class OptimalParams(NamedTuple):
    """Capacity-achieving squeezing and modulation variance."""

    r: float
    sigma_msg_sq: float


def optimal_params(n_modes: int, nbar: float) -> OptimalParams:
    """Capacity-achieving (r, sigma_msg^2) under the photon budget nbar.

    r = (1/2) ln(1 + 2 nbar / (n-1)) and
    sigma^2 = (n-1) sinh(2r) / n; photon_constraint round-trips to nbar.
    """
    if n_modes < 2:
        raise ValueError(f"need at least two modes, got {n_modes}")
    if not np.isfinite(nbar) or nbar < 0:
        raise ValueError(f"nbar must be finite and >= 0, got {nbar}")
    x = 2.0 * nbar / (n_modes - 1)
    r = 0.5 * np.log1p(x)
    sinh_2r = x * (2.0 + x) / (2.0 * (1.0 + x))
    return OptimalParams(float(r), float((n_modes - 1) * sinh_2r / n_modes))


@dataclass(frozen=True)
class CapacityReport:
    """Capacity of one network configuration, with the classical benchmark
    at the same photon budget and their difference delta (all in nats)."""

    n_modes: int
    taus: tuple[float, ...]
    nbar: float
    r: float
    sigma_msg_sq: float
    c_quantum: float
    c_classical: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        for name in ("nbar", "r", "sigma_msg_sq", "c_quantum", "c_classical", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if len(self.taus) != self.n_modes - 1:
            raise ValueError("taus length does not match n_modes")
        if self.c_quantum < 0 or self.c_classical < 0:
            raise ValueError("capacities cannot be negative")


def capacity(n_modes: int, taus: Sequence[float], nbar: float) -> CapacityReport:
    """Network capacity at photon budget nbar with optimal (r, sigma^2).

    Uses the exact channel determinant; the classical benchmark for the
    same number of senders and budget rides along in the report.
    """
    from .advantage_analysis import classical_capacity

    taus = tuple(float(t) for t in taus)
    if len(taus) != n_modes - 1:
        raise ValueError(f"{n_modes}-mode chain needs {n_modes - 1} transmissivities")
    r, sigma_sq = optimal_params(n_modes, nbar)
    if sigma_sq > 0.0:
        spec = ResourceSpec(n_modes, r, taus)
        plan = EncodingPlan.standard(n_modes, np.sqrt(sigma_sq))
        c_q = mutual_information(build_channel(spec, plan))
    else:
        c_q = 0.0  # nbar = 0: nothing to modulate with
    c_cl = classical_capacity(n_modes - 1, nbar)
    return CapacityReport(
        n_modes=n_modes,
        taus=taus,
        nbar=nbar,
        r=r,
        sigma_msg_sq=sigma_sq,
        c_quantum=c_q,
        c_classical=c_cl,
        delta=c_q - c_cl,
    )


def channel_matrix_batch(n_modes: int, taus_grid) -> np.ndarray:
    """Channel matrices for a whole grid of chain transmissivities.

    taus_grid has shape (G, n_modes - 1); the result has shape
    (G, n_modes, n_modes) and row g equals the matrix of
    build_channel(ResourceSpec(n_modes, r, taus_grid[g]), standard plan)
    for any r > 0. Used by the advantage scans, where building states
    point by point would dominate the runtime.
    """
    taus = np.asarray(taus_grid, dtype=float)
    if taus.ndim != 2 or taus.shape[1] != n_modes - 1:
        raise ValueError(f"taus_grid shape {taus.shape}, expected (G, {n_modes - 1})")
    if taus.size and (taus.min() < 0.0 or taus.max() > 1.0):
        raise ValueError("transmissivities must lie in [0, 1]")
    g_count = taus.shape[0]
    plan = EncodingPlan.standard(n_modes, 1.0)  # sigma is irrelevant to the matrix
    x = np.broadcast_to(encoding_matrix(plan), (g_count, 2 * n_modes, n_modes)).copy()
    for k in reversed(range(n_modes - 1)):
        t = np.sqrt(taus[:, k])[:, None, None]
        rfl = np.sqrt(1.0 - taus[:, k])[:, None, None]
        upper = x[:, 2 * k : 2 * k + 2, :]
        lower = x[:, 2 * k + 2 : 2 * k + 4, :]
        # adjoint beam-splitter block [[t, rfl], [-rfl, t]] acting in place
        new_upper = t * upper + rfl * lower
        new_lower = -rfl * upper + t * lower
        x[:, 2 * k : 2 * k + 2, :] = new_upper
        x[:, 2 * k + 2 : 2 * k + 4, :] = new_lower
    x[:, 2:, :] *= -1.0
    rows = alternating_pattern(n_modes).flat_indices()
    return x[:, rows, :]
