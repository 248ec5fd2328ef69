"""MCMC kernels: random-walk Metropolis-Hastings and a slice/Gibbs sampler.

The MH engine works on any TargetDensity. Proposal scale can be calibrated
to a desired acceptance rate by a stochastic-approximation loop whose
output is then frozen: downstream chains never adapt, so their invariant
distribution is untouched. Calibration draws are discarded.

The slice sampler is specialized to the ratio density
exp(-x^2/2)/(1 + x^2 + x^4): an auxiliary u | x ~ U(0, 1/(1+x^2+x^4))
turns x | u into a standard normal truncated to [-b(u), b(u)] with
1 + b^2 + b^4 = 1/u, sampled by inverse CDF (no rejection loop, which
matters because b(u) -> 0 as u -> 1).

Chains are strictly sequential; parallelism belongs across chains, one
derived substream each. A trace replays bit-exactly from a fresh stream
with the recorded (seed, stream_id).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rng import RngStream, sample_normal, sample_truncated_normal
from .targets import TargetDensity

__all__ = [
    "ChainTrace",
    "RwProposal",
    "CalibrationReport",
    "CalibrationError",
    "mh_acceptance_log_prob",
    "mh_step",
    "run_mh_chain",
    "calibrate_scale",
    "calibrate_scale_report",
    "slice_truncation_bound",
    "slice_gibbs_step",
    "run_gibbs_chain",
    "discrete_mh_transition_matrix",
    "batch_means_se",
]


@dataclass(frozen=True)
class ChainTrace:
    """States of one chain, with burn-in marker and stream identity.

    `accepted` is a boolean array for MH chains and None for Gibbs chains
    (every Gibbs move is accepted by construction). `seed_info` identifies
    the fresh stream the chain consumed, so the trace can be replayed.
    """

    states: np.ndarray
    accepted: np.ndarray | None
    burn_in: int
    seed_info: tuple[int, int]

    def __post_init__(self) -> None:
        if self.accepted is not None and len(self.accepted) != len(self.states):
            raise ValueError("accepted and states must have equal length")
        if not 0 <= self.burn_in <= len(self.states):
            raise ValueError(f"burn_in {self.burn_in} outside [0, {len(self.states)}]")

    @property
    def acceptance_rate(self) -> float:
        """Fraction of accepted proposals over the whole trace (MH only)."""
        if self.accepted is None:
            raise ValueError("Gibbs traces have no acceptance record")
        return float(np.mean(self.accepted))

    def retained(self) -> np.ndarray:
        """States after burn-in."""
        return self.states[self.burn_in:]


@dataclass(frozen=True)
class RwProposal:
    """Symmetric normal random-walk proposal: y ~ N(x, scale^2)."""

    scale: float

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale!r}")


def mh_acceptance_log_prob(x: float, y: float, target: TargetDensity,
                           proposal_logpdf: Callable[[float, float], float] | None = None,
                           ) -> float:
    """Log acceptance probability min(0, log[f(y)q(x|y)] - log[f(x)q(y|x)]).

    `proposal_logpdf(to, from_)` may be None for symmetric proposals, whose
    q terms cancel. Proposals outside the target support return -inf; a
    current state outside the support is a chain invariant violation and
    raises.
    """
    lfx = target.logpdf(x)
    if not math.isfinite(lfx):
        raise ValueError(f"current state {x!r} has zero target density")
    lfy = target.logpdf(y)
    if lfy == -math.inf:
        return -math.inf
    num, den = lfy, lfx
    if proposal_logpdf is not None:
        num += proposal_logpdf(x, y)
        den += proposal_logpdf(y, x)
    return min(0.0, num - den)


def mh_step(x: float, target: TargetDensity, prop: RwProposal,
            rng: RngStream) -> tuple[float, bool]:
    """One random-walk MH transition from x; returns (next state, accepted).

    Consumes exactly one normal and one uniform draw regardless of the
    accept/reject outcome, keeping stream alignment predictable.
    """
    y = sample_normal(rng, x, prop.scale)
    log_alpha = mh_acceptance_log_prob(x, y, target)
    u = rng.next_float_open()
    accepted = log_alpha >= 0.0 or math.log(u) < log_alpha
    return (y, True) if accepted else (x, False)


def run_mh_chain(target: TargetDensity, prop: RwProposal, init: float,
                 iters: int, burn_in: int, rng: RngStream) -> ChainTrace:
    """Run an MH chain for `iters` steps from `init` on a fresh stream.

    The trace holds all `iters` post-move states; `burn_in` marks how many
    lead states retained() drops. Pass a freshly constructed (sub)stream:
    seed_info only replays the chain if no draws preceded it.
    """
    _check_lengths(iters, burn_in)
    states = np.empty(iters)
    accepted = np.empty(iters, dtype=bool)
    x = float(init)
    lfx = target.logpdf(x)
    if not math.isfinite(lfx):
        raise ValueError(f"init {init!r} has zero target density")
    # Inlined mh_step with the current log density cached; draw-for-draw
    # and branch-for-branch identical to calling mh_step in a loop.
    logpdf = target.logpdf
    scale = prop.scale
    for t in range(iters):
        y = sample_normal(rng, x, scale)
        lfy = logpdf(y)
        log_alpha = lfy - lfx
        u = rng.next_float_open()
        if log_alpha >= 0.0 or math.log(u) < log_alpha:
            x, lfx = y, lfy
            accepted[t] = True
        else:
            accepted[t] = False
        states[t] = x
    return ChainTrace(states, accepted, burn_in, (rng.seed, rng.stream_id))


def _check_lengths(iters: int, burn_in: int) -> None:
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    if iters <= burn_in:
        raise ValueError(f"iters ({iters}) must exceed burn_in ({burn_in})")


# ---------------------------------------------------------------------------
# Proposal scale calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationReport:
    scale: float
    measured_rate: float  # acceptance over the frozen validation run
    windows_used: int


class CalibrationError(RuntimeError):
    """Calibration missed the target band; carries the best attempt."""

    def __init__(self, message: str, best_scale: float, measured_rate: float):
        super().__init__(message)
        self.best_scale = best_scale
        self.measured_rate = measured_rate


def calibrate_scale_report(target: TargetDensity, target_accept: float,
                           init: float, rng: RngStream, *,
                           windows: int = 50, window_steps: int = 400,
                           validation_steps: int = 20_000,
                           tol: float = 0.05) -> CalibrationReport:
    """Calibrate the RW proposal scale to a desired acceptance rate.

    Stochastic approximation on log(scale): after each window of
    `window_steps` MH steps, log(scale) moves by gain_k * (rate - target)
    with gain_k = 4 / k**0.6. The gain decays slowly enough to travel the
    several log-units needed for extreme targets (a 1/k schedule stalls
    short of, e.g., target 0.999), and the tail average over the last 10
    windows smooths the remaining oscillation. The averaged scale is then
    frozen and validated on a fresh `validation_steps` run; a miss beyond
    `tol` raises CalibrationError carrying the attempt.
    """
    if not 0.0 < target_accept < 1.0:
        raise ValueError(f"target_accept must be in (0, 1), got {target_accept!r}")
    if windows < 10 or window_steps < 1:
        raise ValueError("need at least 10 windows of at least 1 step")

    log_scale = 0.0
    x = float(init)
    tail: list[float] = []
    for k in range(1, windows + 1):
        prop = RwProposal(math.exp(log_scale))
        acc = 0
        for _ in range(window_steps):
            x, a = mh_step(x, target, prop, rng)
            acc += a
        rate = acc / window_steps
        log_scale += (4.0 / k**0.6) * (rate - target_accept)
        tail.append(log_scale)

    scale = math.exp(sum(tail[-10:]) / 10.0)
    validation = run_mh_chain(target, RwProposal(scale), init,
                              validation_steps, 0, rng)
    measured = validation.acceptance_rate
    if abs(measured - target_accept) > tol:
        raise CalibrationError(
            f"calibration missed: scale {scale:.6g} gives acceptance "
            f"{measured:.4f}, target {target_accept} +/- {tol}",
            best_scale=scale, measured_rate=measured)
    return CalibrationReport(scale, measured, windows)


def calibrate_scale(target: TargetDensity, target_accept: float,
                    init: float, rng: RngStream, **kwargs) -> float:
    """Calibrated proposal scale; see calibrate_scale_report for the method."""
    return calibrate_scale_report(target, target_accept, init, rng, **kwargs).scale


# ---------------------------------------------------------------------------
# Slice / Gibbs sampler for the ratio target
# ---------------------------------------------------------------------------

def slice_truncation_bound(u: float) -> float:
    """Positive root b of 1 + b^2 + b^4 = 1/u; the slice is [-b, b].

    b^2 = (sqrt((4-3u)/u) - 1)/2, rewritten as a cancellation-free ratio so
    b(1) = 0 exactly and accuracy holds as u -> 1.
    """
    if not 0.0 < u <= 1.0:
        raise ValueError(f"u must be in (0, 1], got {u!r}")
    s = math.sqrt((4.0 - 3.0 * u) / u)
    d = 4.0 * (1.0 - u) / u  # equals s^2 - 1 without cancellation
    return math.sqrt(d / (2.0 * (s + 1.0)))


def slice_gibbs_step(x: float, rng: RngStream) -> float:
    """One slice/Gibbs update: u | x uniform on the slice, then x | u.

    u ~ U(0, 1/(1+x^2+x^4)) drawn on the open interval, so u > 0 and the
    truncation bound always exceeds |x| (the slice contains the current
    state by construction).
    """
    if not math.isfinite(x):
        raise ValueError(f"state must be finite, got {x!r}")
    x2 = x * x
    u = rng.next_float_open() / (1.0 + x2 + x2 * x2)
    b = slice_truncation_bound(u)
    return sample_truncated_normal(rng, 0.0, 1.0, -b, b)


def run_gibbs_chain(init: float, iters: int, burn_in: int,
                    rng: RngStream) -> ChainTrace:
    """Run the slice/Gibbs chain for the ratio target; accepted is None."""
    _check_lengths(iters, burn_in)
    states = np.empty(iters)
    x = float(init)
    for t in range(iters):
        x = slice_gibbs_step(x, rng)
        states[t] = x
    return ChainTrace(states, None, burn_in, (rng.seed, rng.stream_id))


# ---------------------------------------------------------------------------
# Discrete oracle and batch-means error
# ---------------------------------------------------------------------------

def discrete_mh_transition_matrix(pmf, proposal_matrix) -> np.ndarray:
    """Exact MH transition matrix on a finite state space.

    P[i, j] = q(j|i) * min(1, pi_j q(i|j) / (pi_i q(j|i))) off the diagonal;
    the diagonal absorbs the rejection mass. Satisfies detailed balance by
    construction, which makes it a brute-force oracle for the continuous
    kernel restricted to a binned target.
    """
    pi = np.asarray(pmf, dtype=float)
    q = np.asarray(proposal_matrix, dtype=float)
    n = pi.size
    if not (np.all(pi > 0.0) and abs(pi.sum() - 1.0) < 1e-9):
        raise ValueError("pmf must be strictly positive and sum to 1")
    if q.shape != (n, n) or np.any(q < 0.0) or np.any(np.abs(q.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("proposal matrix must be row-stochastic and match pmf size")

    flow_in = pi[None, :] * q.T     # pi_j q(i|j)
    flow_out = pi[:, None] * q      # pi_i q(j|i)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(flow_out > 0.0, flow_in / flow_out, 0.0)
    p = q * np.minimum(1.0, ratio)
    np.fill_diagonal(p, 0.0)
    np.fill_diagonal(p, 1.0 - p.sum(axis=1))
    return p


def batch_means_se(values, n_batches: int = 50) -> float:
    """Batch-means standard error of the mean for correlated draws.

    Splits the sequence into equal contiguous batches (tail remainder
    dropped) and reports std(batch means)/sqrt(n_batches). The iid SE is
    too small for MCMC output; this is the honest band width.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 4:
        raise ValueError("need at least 4 values for batch means")
    n_batches = min(n_batches, v.size // 2)
    m = v.size // n_batches
    batches = v[:n_batches * m].reshape(n_batches, m).mean(axis=1)
    return float(np.std(batches, ddof=1) / math.sqrt(n_batches))
