"""Low-complexity pipeline for the two-block active IRS.

Block 1 serves Bob with the confidential message (CM), block 2 serves Eve
with artificial noise (AN).  Each loop pass computes, in closed form:

* null-space-projected unit beamformers: the AN beam lives in the null
  space of (Bob's direct channel, block-1 forward channel) and points at
  Eve's effective channel; the CM beam lives in the null space of (Eve's
  direct channel, block-2 forward channel) and points at Bob's effective
  channel.  Hence Bob hears no AN except through block 2, and Eve hears no
  CM except through block 1;
* phase-aligned unit reflect vectors: each block's reflection is matched
  to its serving cascade and rotated so the reflected path adds coherently
  with the receiver's direct path;
* amplification gains that spend exactly the IRS power share: block 1 gets
  mu and block 2 (1-mu) of the IRS budget (1-eta) * p_s;
* a power-split (eta, beta) search over a closed-form scalarized secrecy
  rate that is O(1) per candidate after precomputation.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .scene import BlockedChannelSet
from .model import NoiseProfile
from .pa_search import SearchSpec, SearchResult, exhaustive_search
from .trace import RunTrace

__all__ = [
    "PaFactors",
    "BlockDesign",
    "nsp_projector",
    "nsp_beamformers",
    "mrr_reflect",
    "amplification_rho",
    "pa_sinrs",
    "blocked_secrecy_rate",
    "PaScalarContext",
    "sr1",
    "NspOptions",
    "run_nsp_mrr_pa",
]


@dataclass
class PaFactors:
    """Power-allocation factors, all in the open unit interval."""

    eta: float    # BS share of the total power (IRS gets 1 - eta)
    beta: float   # CM share of the BS power (AN gets 1 - beta)
    mu: float = 0.8  # block-1 share of the IRS power

    def __post_init__(self) -> None:
        for name in ("eta", "beta", "mu"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must be in (0, 1), got {v}")


@dataclass
class BlockDesign:
    """One candidate design of the blocked system."""

    v_b: np.ndarray      # (M,) unit CM beamformer
    v_e: np.ndarray      # (M,) unit AN beamformer
    theta1: np.ndarray   # (N1,) unit reflect vector of block 1
    theta2: np.ndarray   # (N2,) unit reflect vector of block 2
    rho1: float          # block-1 amplification gain
    rho2: float          # block-2 amplification gain
    pa: PaFactors
    p_s: float           # total power budget (BS + IRS), watts


def nsp_projector(Q: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the null space of the rows of Q."""
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    m = Q.shape[1]
    gram = Q @ Q.conj().T
    return np.eye(m) - Q.conj().T @ np.linalg.pinv(gram) @ Q


def _cascade_col(theta: np.ndarray, g: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Column form of the reflected path theta^H diag(g^H) H (i.e. its ^H)."""
    return H.conj().T @ (theta * g)


def _cascade_gain(theta: np.ndarray, g: np.ndarray, H: np.ndarray,
                  v: np.ndarray) -> complex:
    """Scalar theta^H diag(g^H) H v."""
    return complex(np.vdot(theta, g.conj() * (H @ v)))


def _null_space_unit(T: np.ndarray) -> np.ndarray:
    """A deterministic unit vector inside the projector's range."""
    w, V = np.linalg.eigh(T)
    return V[:, -1]


def nsp_beamformers(bch: BlockedChannelSet, d: BlockDesign,
                    ) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Unit CM/AN beamformers by projection onto the protecting null spaces.

    Returns (v_b, v_e, flags).  v_e is orthogonal to Bob's direct channel
    and every row of block 1's forward channel; v_b is orthogonal to Eve's
    direct channel and every row of block 2's forward channel.  Within its
    null space each beam maximizes the gain of a rank-one target (the
    served receiver's direct-plus-reflected channel), so the normalized
    projection of the target is optimal.  A target that falls entirely
    inside the nulled span triggers a deterministic fallback, flagged.
    """
    flags: list[str] = []

    Q1 = np.vstack([bch.h_b.conj()[None, :], bch.H_s1])
    T1 = nsp_projector(Q1)
    target_e = bch.h_e + d.rho2 * _cascade_col(d.theta2, bch.g_e2, bch.H_s2)
    v_e = _project_or_fallback(T1, target_e, bch.h_e, "v_e", flags)

    Q2 = np.vstack([bch.h_e.conj()[None, :], bch.H_s2])
    T2 = nsp_projector(Q2)
    target_b = bch.h_b + d.rho1 * _cascade_col(d.theta1, bch.g_b1, bch.H_s1)
    v_b = _project_or_fallback(T2, target_b, bch.h_b, "v_b", flags)
    return v_b, v_e, flags


def _project_or_fallback(T: np.ndarray, target: np.ndarray, direct: np.ndarray,
                         name: str, flags: list[str]) -> np.ndarray:
    proj = T @ target
    nrm = float(np.linalg.norm(proj))
    if nrm > 1e-12 * float(np.linalg.norm(target)):
        return proj / nrm
    flags.append(f"nsp-degenerate:{name}")
    proj = T @ direct
    nrm = float(np.linalg.norm(proj))
    if nrm > 1e-12 * float(np.linalg.norm(direct)):
        return proj / nrm
    return _null_space_unit(T)


def mrr_reflect(bch: BlockedChannelSet, d: BlockDesign,
                ) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Unit reflect vectors matched to each block's serving cascade.

    Block 1 is matched to (block-1 forward) x (block-1 -> Bob) for the CM
    beam and rotated to the phase of Bob's direct gain; block 2 likewise
    for the AN beam and Eve.  The cascaded gain then equals the cascade
    norm times the direct-path phase, i.e. reflected and direct paths add
    coherently.  A zero cascade falls back to a uniform-phase unit vector.
    """
    flags: list[str] = []

    c1 = bch.g_b1.conj() * (bch.H_s1 @ d.v_b)
    n1 = float(np.linalg.norm(c1))
    if n1 < 1e-30:
        flags.append("mrr-degenerate:theta1")
        theta1 = np.ones(bch.n1, dtype=complex) / math.sqrt(bch.n1)
    else:
        phi1 = float(np.angle(np.vdot(bch.h_b, d.v_b)))
        theta1 = (c1 / n1) * np.exp(-1j * phi1)

    c2 = bch.g_e2.conj() * (bch.H_s2 @ d.v_e)
    n2 = float(np.linalg.norm(c2))
    if n2 < 1e-30:
        flags.append("mrr-degenerate:theta2")
        theta2 = np.ones(bch.n2, dtype=complex) / math.sqrt(bch.n2)
    else:
        phi2 = float(np.angle(np.vdot(bch.h_e, d.v_e)))
        theta2 = (c2 / n2) * np.exp(-1j * phi2)
    return theta1, theta2, flags


def amplification_rho(bch: BlockedChannelSet, d: BlockDesign,
                      noise: NoiseProfile) -> tuple[float, float]:
    """Amplification gains that spend each block's exact IRS power share.

    Block k re-radiates (incident signal + its own noise) scaled by rho_k^2;
    the gains are chosen so block 1 emits mu * (1 - eta) * p_s and block 2
    (1 - mu) * (1 - eta) * p_s on average, hence the IRS as a whole spends
    exactly (1 - eta) * p_s.
    """
    eta, beta, mu = d.pa.eta, d.pa.beta, d.pa.mu
    s1 = float(np.sum(np.abs(d.theta1) ** 2 * np.abs(bch.H_s1 @ d.v_b) ** 2))
    s2 = float(np.sum(np.abs(d.theta2) ** 2 * np.abs(bch.H_s2 @ d.v_e) ** 2))
    rho1 = math.sqrt((1.0 - eta) * mu * d.p_s
                     / (eta * beta * d.p_s * s1 + noise.sigma2_irs))
    rho2 = math.sqrt((1.0 - eta) * (1.0 - mu) * d.p_s
                     / (eta * (1.0 - beta) * d.p_s * s2 + noise.sigma2_irs))
    return rho1, rho2


def pa_sinrs(bch: BlockedChannelSet, d: BlockDesign,
             noise: NoiseProfile) -> tuple[float, float]:
    """(gamma_b, gamma_e) of the blocked system at a full design.

    Bob's numerator carries the direct plus block-1 CM path; his only AN
    exposure is the block-2 leakage.  Eve's numerator is the block-1 CM
    leakage; she receives AN directly and via block 2.  Both denominators
    include the amplified IRS noise forwarded by each block.
    """
    eta, beta = d.pa.eta, d.pa.beta
    p_cm = eta * beta * d.p_s
    p_an = eta * (1.0 - beta) * d.p_s

    t_bob = complex(np.vdot(bch.h_b, d.v_b)) + d.rho1 * _cascade_gain(d.theta1, bch.g_b1, bch.H_s1, d.v_b)
    leak_b = d.rho2 * _cascade_gain(d.theta2, bch.g_b2, bch.H_s2, d.v_e)
    amp_b1 = noise.sigma2_irs * d.rho1 ** 2 * float(np.sum(np.abs(d.theta1) ** 2 * np.abs(bch.g_b1) ** 2))
    amp_b2 = noise.sigma2_irs * d.rho2 ** 2 * float(np.sum(np.abs(d.theta2) ** 2 * np.abs(bch.g_b2) ** 2))
    gamma_b = p_cm * abs(t_bob) ** 2 / (p_an * abs(leak_b) ** 2 + amp_b1 + amp_b2 + noise.sigma2_b)

    leak_e = d.rho1 * _cascade_gain(d.theta1, bch.g_e1, bch.H_s1, d.v_b)
    t_eve = complex(np.vdot(bch.h_e, d.v_e)) + d.rho2 * _cascade_gain(d.theta2, bch.g_e2, bch.H_s2, d.v_e)
    amp_e1 = noise.sigma2_irs * d.rho1 ** 2 * float(np.sum(np.abs(d.theta1) ** 2 * np.abs(bch.g_e1) ** 2))
    amp_e2 = noise.sigma2_irs * d.rho2 ** 2 * float(np.sum(np.abs(d.theta2) ** 2 * np.abs(bch.g_e2) ** 2))
    gamma_e = p_cm * abs(leak_e) ** 2 / (p_an * abs(t_eve) ** 2 + amp_e1 + amp_e2 + noise.sigma2_e)
    return float(gamma_b), float(gamma_e)


def blocked_secrecy_rate(bch: BlockedChannelSet, d: BlockDesign,
                         noise: NoiseProfile, ratio_objective: bool = False) -> float:
    """Secrecy rate of the blocked system in bits (difference of logs).

    ``ratio_objective=True`` instead returns the ratio of the two log
    terms, kept as an alternative reading for reproduction experiments.
    """
    gamma_b, gamma_e = pa_sinrs(bch, d, noise)
    if ratio_objective:
        return math.log2(1.0 + gamma_b) / math.log2(1.0 + gamma_e)
    return math.log2(1.0 + gamma_b) - math.log2(1.0 + gamma_e)


class PaScalarContext:
    """O(1)-per-candidate secrecy rate as a function of (eta, beta).

    Precomputes every channel/beam scalar at fixed unit vectors so the
    power-split search can evaluate thousands of (eta, beta) candidates
    (scalars or equal-shape arrays) with plain arithmetic.  The embedded
    amplification gains are the exact closed forms at each candidate.
    """

    vectorized = True

    def __init__(self, bch: BlockedChannelSet, v_b: np.ndarray, v_e: np.ndarray,
                 theta1: np.ndarray, theta2: np.ndarray, mu: float, p_s: float,
                 noise: NoiseProfile, ratio_objective: bool = False):
        self.mu = float(mu)
        self.p_s = float(p_s)
        self.sigma2_1 = noise.sigma2_irs
        self.sigma2_2 = noise.sigma2_irs
        self.sigma2_b = noise.sigma2_b
        self.sigma2_e = noise.sigma2_e
        self.ratio_objective = ratio_objective

        k_b1 = _cascade_gain(theta1, bch.g_b1, bch.H_s1, v_b)
        k_b2 = _cascade_gain(theta2, bch.g_b2, bch.H_s2, v_e)
        k_e1 = _cascade_gain(theta1, bch.g_e1, bch.H_s1, v_b)
        k_e2 = _cascade_gain(theta2, bch.g_e2, bch.H_s2, v_e)
        d_bb = complex(np.vdot(bch.h_b, v_b))
        d_ee = complex(np.vdot(bch.h_e, v_e))

        self.a = abs(k_b1) ** 2
        self.b = (np.conj(d_bb) * k_b1).real
        self.c = abs(d_bb) ** 2
        self.d = abs(k_b2) ** 2
        self.e = self.sigma2_1 * float(np.sum(np.abs(theta1) ** 2 * np.abs(bch.g_b1) ** 2))
        self.f = self.sigma2_2 * float(np.sum(np.abs(theta2) ** 2 * np.abs(bch.g_b2) ** 2))
        self.a_hat = abs(k_e1) ** 2
        self.b_hat = abs(k_e2) ** 2
        self.c_hat = (np.conj(d_ee) * k_e2).real
        self.d_hat = abs(d_ee) ** 2
        self.e_hat = self.sigma2_1 * float(np.sum(np.abs(theta1) ** 2 * np.abs(bch.g_e1) ** 2))
        self.f_hat = self.sigma2_2 * float(np.sum(np.abs(theta2) ** 2 * np.abs(bch.g_e2) ** 2))
        self.s1 = float(np.sum(np.abs(theta1) ** 2 * np.abs(bch.H_s1 @ v_b) ** 2))
        self.s2 = float(np.sum(np.abs(theta2) ** 2 * np.abs(bch.H_s2 @ v_e) ** 2))

    def _check_box(self, eta, beta) -> None:
        eta = np.asarray(eta)
        beta = np.asarray(beta)
        if np.any(eta <= 0.0) or np.any(eta >= 1.0) or np.any(beta <= 0.0) or np.any(beta >= 1.0):
            raise ValueError("eta and beta must lie strictly inside (0, 1)")

    def incident_powers(self, eta, beta):
        """(A, B): per-block incident power (signal + IRS noise) at unit gain."""
        ps = self.p_s
        A = eta * beta * ps * self.s1 + self.sigma2_1
        B = eta * (1.0 - beta) * ps * self.s2 + self.sigma2_2
        return A, B

    def rho(self, eta, beta):
        """Amplification gains embedded in the scalar path."""
        self._check_box(eta, beta)
        A, B = self.incident_powers(eta, beta)
        rho1 = np.sqrt((1.0 - eta) * self.mu * self.p_s / A)
        rho2 = np.sqrt((1.0 - eta) * (1.0 - self.mu) * self.p_s / B)
        return rho1, rho2

    def sinrs(self, eta, beta):
        """(gamma_b, gamma_e) after substituting the amplification gains."""
        self._check_box(eta, beta)
        ps, mu = self.p_s, self.mu
        A, B = self.incident_powers(eta, beta)
        g_b1 = eta * beta * ps * (self.a * (1.0 - eta) * mu * ps * B
                                  + 2.0 * self.b * B * np.sqrt((1.0 - eta) * mu * ps * A)
                                  + self.c * A * B)
        g_b2 = (self.d * eta * (1.0 - eta) * (1.0 - beta) * (1.0 - mu) * ps ** 2 * A
                + self.e * (1.0 - eta) * mu * ps * B
                + self.f * (1.0 - eta) * (1.0 - mu) * ps * A
                + self.sigma2_b * A * B)
        g_e1 = eta * (1.0 - eta) * beta * mu * ps ** 2 * self.a_hat * B
        g_e2 = (eta * (1.0 - beta) * ps * (self.b_hat * (1.0 - eta) * (1.0 - mu) * ps * A
                                           + 2.0 * self.c_hat * A * np.sqrt((1.0 - eta) * (1.0 - mu) * ps * B)
                                           + self.d_hat * A * B)
                + self.e_hat * (1.0 - eta) * mu * ps * B
                + self.f_hat * (1.0 - eta) * (1.0 - mu) * ps * A
                + self.sigma2_e * A * B)
        return g_b1 / g_b2, g_e1 / g_e2

    def __call__(self, eta, beta):
        """Secrecy rate in bits at (eta, beta); arrays broadcast elementwise."""
        gamma_b, gamma_e = self.sinrs(eta, beta)
        if self.ratio_objective:
            return np.log2(1.0 + gamma_b) / np.log2(1.0 + gamma_e)
        return np.log2(1.0 + gamma_b) - np.log2(1.0 + gamma_e)


def sr1(eta, beta, context: PaScalarContext):
    """Secrecy rate (bits) of the blocked system at a power split.

    Thin functional wrapper over a prepared :class:`PaScalarContext`;
    accepts scalars or broadcastable arrays.
    """
    return context(eta, beta)


@dataclass
class NspOptions:
    eps: float = 1e-4        # stop when both beamformer updates move less than this
    max_iters: int = 100
    mu: float = 0.8          # block-1 share of the IRS power
    ratio_objective: bool = False
    search_params: dict | None = None  # extra SearchSpec fields for the PA search


def run_nsp_mrr_pa(bch: BlockedChannelSet, noise: NoiseProfile, p_s: float,
                   searcher: Callable[[SearchSpec], SearchResult] = exhaustive_search,
                   seed: int = 0, options: NspOptions | None = None,
                   ) -> tuple[BlockDesign, RunTrace]:
    """Alternate beamformers, reflect vectors, amplification and PA search.

    Stops once both unit beamformers move by at most ``eps`` between
    consecutive iterations (or at the cap, flagged).  The returned design
    carries amplification gains recomputed at the searched (eta, beta), so
    its BS + IRS power spend equals p_s exactly.  Deterministic for fixed
    inputs; ``seed`` only feeds stochastic searchers.
    """
    opt = options or NspOptions()
    trace = RunTrace()
    t0 = time.perf_counter()
    m = bch.h_b.size

    d = BlockDesign(
        v_b=np.zeros(m, dtype=complex),
        v_e=np.zeros(m, dtype=complex),
        theta1=np.ones(bch.n1, dtype=complex) / math.sqrt(bch.n1),
        theta2=np.ones(bch.n2, dtype=complex) / math.sqrt(bch.n2),
        rho1=0.0, rho2=0.0,
        pa=PaFactors(eta=0.5, beta=0.5, mu=opt.mu),
        p_s=p_s,
    )

    for it in range(1, opt.max_iters + 1):
        prev_vb, prev_ve = d.v_b, d.v_e
        v_b, v_e, fl = nsp_beamformers(bch, d)
        d.v_b, d.v_e = v_b, v_e
        theta1, theta2, fl2 = mrr_reflect(bch, d)
        d.theta1, d.theta2 = theta1, theta2
        d.rho1, d.rho2 = amplification_rho(bch, d, noise)
        for flag in fl + fl2:
            trace.add_flag(flag)

        ctx = PaScalarContext(bch, d.v_b, d.v_e, d.theta1, d.theta2,
                              opt.mu, p_s, noise, opt.ratio_objective)
        params = dict(opt.search_params or {})
        spec = SearchSpec(objective=ctx, vectorized=True,
                          seed=seed + it - 1, **params)
        res = searcher(spec)
        eta, beta = res.point
        d.pa = PaFactors(eta=eta, beta=beta, mu=opt.mu)
        d.rho1, d.rho2 = amplification_rho(bch, d, noise)

        delta_b = float(np.linalg.norm(d.v_b - prev_vb))
        delta_e = float(np.linalg.norm(d.v_e - prev_ve))
        trace.rows.append({
            "iteration": it,
            "eta": eta,
            "beta": beta,
            "rho1": d.rho1,
            "rho2": d.rho2,
            "sr_bits": float(res.value),
            "beamformer_delta": max(delta_b, delta_e),
            "search_evals": res.evaluations,
            "wall_time_s": time.perf_counter() - t0,
        })
        trace.iterations = it
        if delta_b <= opt.eps and delta_e <= opt.eps:
            trace.converged = True
            break
    if not trace.converged:
        trace.add_flag("iteration-cap")
    trace.wall_time_s = time.perf_counter() - t0
    return d, trace
