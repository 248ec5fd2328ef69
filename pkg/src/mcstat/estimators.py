"""Monte Carlo estimators: running means, importance sampling, evidence.

The running-mean type uses the one-pass Welford recurrence so traces of
partial estimates come for free. Importance sampling keeps every weight in
log space with a max shift; the effective sample size and a bootstrap
standard error are the instability diagnostics.

Three marginal-likelihood (evidence) estimators share the EvidenceEstimate
result type: the harmonic mean of likelihoods, the iterative optimal-bridge
estimator of Meng and Wong, and Chib's posterior-ordinate identity with a
normal parametric fit. The harmonic mean is implemented without any
variance-stabilizing truncation on purpose: its instability is a quantity
the experiment harness measures, not a defect to hide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .rng import RngStream
from .targets import ConjugateNormalModel, TargetDensity

__all__ = [
    "RunningEstimate",
    "WeightedSample",
    "SnisResult",
    "EvidenceEstimate",
    "running_update",
    "mc_estimate",
    "self_normalized_is",
    "ess",
    "harmonic_mean_log_evidence",
    "bridge_log_evidence",
    "chib_log_evidence",
]

_BOOTSTRAP_RESAMPLES = 200


def _logsumexp(arr: np.ndarray) -> float:
    arr = np.asarray(arr, dtype=float)
    m = np.max(arr)
    if not math.isfinite(m):
        # all -inf -> -inf; any +inf/nan propagates
        return float(m) if m == -math.inf else float(np.sum(np.exp(arr - m)))
    return float(m + np.log(np.sum(np.exp(arr - m))))


@dataclass(frozen=True)
class RunningEstimate:
    """Welford accumulator: count, running mean, sum of squared deviations."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @property
    def variance(self) -> float:
        """Population variance of the values seen so far (0 when count < 2)."""
        return self.m2 / self.count if self.count >= 2 else 0.0

    @property
    def se(self) -> float:
        """Standard error of the mean; 0 when count < 2 (undefined)."""
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / self.count) / math.sqrt(self.count)


def running_update(est: RunningEstimate, h_value: float) -> RunningEstimate:
    """One Welford step; returns a new estimate, leaving `est` untouched."""
    if not math.isfinite(h_value):
        raise ValueError(
            f"non-finite value {h_value!r} at iteration {est.count + 1}")
    n = est.count + 1
    delta = h_value - est.mean
    mean = est.mean + delta / n
    m2 = est.m2 + delta * (h_value - mean)
    return RunningEstimate(n, mean, m2)


def mc_estimate(target_sampler: Callable[[RngStream], float],
                h: Callable[[float], float],
                T: int,
                rng: RngStream) -> list[RunningEstimate]:
    """Plain Monte Carlo estimate of E[h(X)] with the full running trace.

    Returns a list of T RunningEstimate snapshots; element t-1 is the
    estimate after t draws. Deterministic given the rng stream.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    trace: list[RunningEstimate] = []
    est = RunningEstimate()
    for t in range(1, T + 1):
        try:
            x = target_sampler(rng)
            val = h(x)
        except ValueError as exc:
            raise ValueError(f"iteration {t}: {exc}") from exc
        if not math.isfinite(val):
            raise ValueError(f"iteration {t}: h returned non-finite value {val!r}")
        est = running_update(est, val)
        trace.append(est)
    return trace


class WeightedSample(NamedTuple):
    """One importance draw: h(x) and its unnormalized log weight."""

    value: float
    log_weight: float


def ess(log_weights: Sequence[float]) -> float:
    """Effective sample size (sum w)^2 / sum w^2 from log weights.

    Max-shifted, so huge negative log weights degrade gracefully to zero
    weight. Always in [1, T]; equals T iff all weights are equal.
    """
    lw = np.asarray(log_weights, dtype=float)
    if lw.size == 0:
        raise ValueError("log_weights must be nonempty")
    if np.any(np.isnan(lw)) or np.any(lw == math.inf):
        raise ValueError("log_weights must be < +inf and not NaN")
    m = float(np.max(lw))
    if m == -math.inf:
        raise ValueError("all weights are zero")
    w = np.exp(lw - m)
    s1 = float(np.sum(w))
    s2 = float(np.dot(w, w))
    return s1 * s1 / s2


@dataclass(frozen=True)
class SnisResult:
    """Self-normalized importance sampling output with diagnostics."""

    estimate: float
    ess: float
    se: float              # nonparametric bootstrap standard error
    n_draws: int
    low_ess_warning: bool  # set when ess < 10; estimate likely unusable


def self_normalized_is(target: TargetDensity,
                       proposal_sampler,
                       h: Callable[[float], float],
                       T: int,
                       rng: RngStream) -> SnisResult:
    """Self-normalized IS estimate of E_target[h] using a tractable proposal.

    `proposal_sampler` needs .sample(rng) and .logpdf(x). Weights are
    exp(log f - log g) after a max shift, so the target may be unnormalized.
    A draw where the target has mass but the proposal density is zero is a
    support violation and raises.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    samples: list[WeightedSample] = []
    for t in range(1, T + 1):
        x = proposal_sampler.sample(rng)
        lg = proposal_sampler.logpdf(x)
        lf = target.logpdf(x)
        if lg == -math.inf and lf > -math.inf:
            raise ValueError(
                f"iteration {t}: target has mass at {x!r} outside proposal support")
        samples.append(WeightedSample(h(x), lf - lg))

    values = np.array([s.value for s in samples])
    lw = np.array([s.log_weight for s in samples])
    m = float(np.max(lw))
    if m == -math.inf:
        raise ValueError("all importance weights are zero")
    w = np.exp(lw - m)
    wsum = float(np.sum(w))
    estimate = float(np.dot(w, values) / wsum)
    eff = float(wsum * wsum / np.dot(w, w))

    # Bootstrap over (value, weight) pairs; no closed-form SE exists under
    # self-normalization. numpy's generator is seeded from the stream so the
    # whole result stays deterministic.
    boot = np.random.default_rng(rng.next_u64())
    reps = np.empty(_BOOTSTRAP_RESAMPLES)
    for b in range(_BOOTSTRAP_RESAMPLES):
        idx = boot.integers(0, T, size=T)
        wb = w[idx]
        reps[b] = np.dot(wb, values[idx]) / np.sum(wb)
    se = float(np.std(reps, ddof=1))

    return SnisResult(estimate, eff, se, T, low_ess_warning=eff < 10.0)


# ---------------------------------------------------------------------------
# Evidence estimators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvidenceEstimate:
    """Log marginal likelihood with estimator identity and diagnostics.

    Consumers must treat estimates with diagnostics['converged'] == False
    as invalid.
    """

    log_evidence: float
    estimator: str  # 'harmonic_mean' | 'bridge' | 'chib'
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics.get("converged", True))


def harmonic_mean_log_evidence(log_liks_at_posterior_draws: Sequence[float]) -> EvidenceEstimate:
    """Harmonic-mean evidence: -[logsumexp(-l_i) - log T] over posterior draws.

    No truncation of small likelihoods is applied; the resulting
    cross-replication spread is the diagnostic of interest.
    """
    ll = np.asarray(log_liks_at_posterior_draws, dtype=float)
    if ll.size == 0:
        raise ValueError("log likelihood list must be nonempty")
    if not np.all(np.isfinite(ll)):
        raise ValueError("log likelihoods must be finite")
    log_ev = -(_logsumexp(-ll) - math.log(ll.size))
    diag = {
        "n_draws": int(ll.size),
        "log_lik_spread": float(np.max(ll) - np.min(ll)),
        "ess": ess(-ll),  # weight concentration of the reciprocal likelihoods
        "converged": True,
    }
    return EvidenceEstimate(log_ev, "harmonic_mean", diag)


def _eval_log_fn(fn, xs: np.ndarray) -> np.ndarray:
    """Evaluate a scalar-or-vectorized log density over an array of points."""
    try:
        out = np.asarray(fn(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(x)) for x in xs])


def bridge_log_evidence(post_draws: Sequence[float],
                        prop_draws: Sequence[float],
                        log_post_unnorm: Callable[[float], float],
                        log_prop: Callable[[float], float],
                        tol: float = 1e-8,
                        max_iter: int = 1000) -> EvidenceEstimate:
    """Iterative optimal-bridge estimate of log integral exp(log_post_unnorm).

    Meng-Wong fixed point on the log ratio lam = log evidence, with
    s1 = n1/(n1+n2), s2 = n2/(n1+n2):

        num =  mean_j  1 / (s1 + s2 exp(lam - l2_j))      over proposal draws
        den =  mean_i  1 / (s1 exp(l1_i) + s2 exp(lam))   over posterior draws

    where l = log_post_unnorm - log_prop at the respective draws. Both sums
    are taken through logaddexp, so no weight ever leaves log space.
    Initialized from the plain importance-sampling estimate on the proposal
    draws; stops when successive lam differ by < tol or max_iter is hit,
    with the convergence flag set accordingly.
    """
    theta1 = np.asarray(post_draws, dtype=float)
    theta2 = np.asarray(prop_draws, dtype=float)
    if theta1.size == 0 or theta2.size == 0:
        raise ValueError("both draw lists must be nonempty")
    n1, n2 = theta1.size, theta2.size

    l1 = _eval_log_fn(log_post_unnorm, theta1) - _eval_log_fn(log_prop, theta1)
    l2 = _eval_log_fn(log_post_unnorm, theta2) - _eval_log_fn(log_prop, theta2)
    if np.any(np.isnan(l1)) or np.any(np.isnan(l2)):
        raise ValueError("log density ratio is NaN at some draw")

    log_s1 = math.log(n1 / (n1 + n2))
    log_s2 = math.log(n2 / (n1 + n2))

    lam = _logsumexp(l2) - math.log(n2)  # simple IS estimate as the seed
    if not math.isfinite(lam):
        raise ValueError("no effective support overlap between draws and proposal")

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        log_num = _logsumexp(l2 - np.logaddexp(log_s1 + l2, log_s2 + lam)) - math.log(n2)
        log_den = _logsumexp(-np.logaddexp(log_s1 + l1, log_s2 + lam)) - math.log(n1)
        if not (math.isfinite(log_num) and math.isfinite(log_den)):
            raise ValueError("bridge iteration left the shared support")
        lam_new = log_num - log_den
        if abs(lam_new - lam) < tol:
            lam = lam_new
            converged = True
            break
        lam = lam_new

    diag = {"iterations": iterations, "converged": converged,
            "n_post": n1, "n_prop": n2}
    return EvidenceEstimate(float(lam), "bridge", diag)


def chib_log_evidence(model: ConjugateNormalModel,
                      data: Sequence[float],
                      posterior_draws: Sequence[float],
                      theta_star: float | None = None) -> EvidenceEstimate:
    """Chib's identity log m = log f(x|t*) + log pi(t*) - log pihat(t*|x).

    The posterior ordinate pihat is a normal density with the draws' sample
    mean and variance; t* defaults to the sample mean, where the ordinate
    estimate has the least variance (the identity holds at any point).
    """
    draws = np.asarray(posterior_draws, dtype=float)
    if draws.size == 0:
        raise ValueError("posterior draws must be nonempty")
    m_hat = float(np.mean(draws))
    v_hat = float(np.var(draws, ddof=1)) if draws.size > 1 else 0.0
    if v_hat <= 0.0:
        raise ValueError("posterior draws have zero sample variance")
    t_star = m_hat if theta_star is None else float(theta_star)

    log_ordinate = (-0.5 * (t_star - m_hat) ** 2 / v_hat
                    - 0.5 * math.log(2.0 * math.pi * v_hat))
    log_ev = (model.log_likelihood(data, t_star) + model.log_prior(t_star)
              - log_ordinate)
    diag = {"theta_star": t_star, "fit_mean": m_hat, "fit_var": v_hat,
            "n_draws": int(draws.size), "converged": True}
    return EvidenceEstimate(float(log_ev), "chib", diag)
