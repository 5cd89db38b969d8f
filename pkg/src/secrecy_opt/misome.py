"""Secrecy capacity machinery for a single-antenna legitimate receiver.

The capacity is found by a two-layer search: an outer one-dimensional search
over the eavesdropper SINR cap tau, and an inner SDP (linear-fractional
program made linear by a scaling variable xi) returning the best receiver
SNR f(tau) under that cap.  A trace-minimizing refinement recovers a
rank-one source covariance from the relaxed inner solution.

Also here: the interference-alignment closed form for the optimal power
split along fixed beamforming directions, and a zero-forcing baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    CovariancePair,
    SecrecyResult,
    WiretapChannel,
    make_secrecy_result,
)
from .convex import SdpProblem, solve_sdp
from .errors import InvalidInputError, SolverFailureError
from .sdof import misome_alignment_directions

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class TwoLayerConfig:
    """Parameters of the outer search and the rank-one recovery."""

    grid_points: int = 200
    refinement_iters: int = 25
    rank_one_ratio: float = 1e-6

    def __post_init__(self):
        if self.grid_points < 2:
            raise InvalidInputError("grid_points must be >= 2")
        if not 0.0 < self.rank_one_ratio < 1.0:
            raise InvalidInputError("rank_one_ratio must lie in (0, 1)")


@dataclass
class CharnesCooperSolution:
    """Scaled inner-problem solution: covariances q_tilde_* and the scaling
    xi satisfy xi + g2 q_tilde_j g2^H = 1; f_tau is the best receiver SNR
    under the eavesdropper SINR cap."""

    q_tilde_a: np.ndarray
    q_tilde_j: np.ndarray
    xi: float
    f_tau: float

    def descaled(self) -> CovariancePair:
        return CovariancePair(qa=self.q_tilde_a / self.xi,
                              qj=self.q_tilde_j / self.xi).clipped()


def _require_miso(ch: WiretapChannel):
    if ch.config.nb != 1:
        raise InvalidInputError(
            f"single-antenna receiver required, got nb={ch.config.nb}"
        )


def inner_sdp_f_tau(ch: WiretapChannel, p: float,
                    tau: float) -> CharnesCooperSolution:
    """Best receiver SNR subject to an eavesdropper SINR cap of ``tau``.

    Solves the scaled SDP: maximize h1 Qa~ h1^H subject to
    xi + g2 Qj~ g2^H = 1, G1 Qa~ G1^H <= tau (xi I + H2 Qj~ H2^H),
    tr(Qa~ + Qj~) <= xi p, with Qa~, Qj~ PSD and xi >= 0.
    """
    _require_miso(ch)
    if tau < 0:
        raise InvalidInputError(f"tau must be nonnegative, got {tau}")
    na, _, ne, nj = ch.config
    h1, g1, g2, h2 = ch.h1, ch.g1, ch.g2, ch.h2

    prob = SdpProblem(
        block_shapes=[na, nj],
        n_scalars=1,
        objective=lambda b, s: np.real(h1 @ b[0] @ h1.conj().T)[0, 0],
        lmi_constraints=[
            lambda b, s: tau * (s[0] * np.eye(ne) + h2 @ b[1] @ h2.conj().T)
            - g1 @ b[0] @ g1.conj().T,
        ],
        eq_constraints=[
            lambda b, s: s[0] + np.real(g2 @ b[1] @ g2.conj().T)[0, 0] - 1.0,
        ],
        ineq_constraints=[
            lambda b, s: np.real(np.trace(b[0]) + np.trace(b[1])) - s[0] * p,
        ],
    )
    try:
        value, (blocks, scalars), status = solve_sdp(prob)
    except SolverFailureError as exc:
        exc.diagnostics["tau"] = tau
        raise
    if status != "optimal":
        raise SolverFailureError(
            f"inner problem not solved at tau={tau:.6g}",
            diagnostics={"tau": tau, "status": status},
        )
    xi = max(float(scalars[0]), 1.0 / (1.0 + p * np.linalg.norm(g2) ** 2) * 1e-3)
    return CharnesCooperSolution(
        q_tilde_a=blocks[0], q_tilde_j=blocks[1], xi=xi,
        f_tau=max(float(value), 0.0),
    )


def power_min_rank_one(ch: WiretapChannel, tau: float, f_tau: float,
                       inner: CharnesCooperSolution | None = None,
                       ratio_threshold: float = 1e-6) -> CovariancePair:
    """Trace-minimizing covariances meeting the SNR target f_tau under the
    tau cap; the minimizer's source covariance is rank-one on generic
    channels.  On numerical infeasibility falls back to the principal
    eigenvector of the relaxed solution (flagged via the returned pair's
    qa having been replaced; callers detect this by re-checking the ratio).
    """
    _require_miso(ch)
    na, _, ne, nj = ch.config
    h1, g1, g2, h2 = ch.h1, ch.g1, ch.g2, ch.h2

    if f_tau <= 0.0:
        return CovariancePair(qa=np.zeros((na, na), dtype=complex),
                              qj=np.zeros((nj, nj), dtype=complex))

    prob = SdpProblem(
        block_shapes=[na, nj],
        n_scalars=0,
        objective=lambda b, s: -np.real(np.trace(b[0]) + np.trace(b[1])),
        lmi_constraints=[
            lambda b, s: tau * (np.eye(ne) + h2 @ b[1] @ h2.conj().T)
            - g1 @ b[0] @ g1.conj().T,
        ],
        ineq_constraints=[
            lambda b, s: f_tau * (1.0 + np.real(g2 @ b[1] @ g2.conj().T)[0, 0])
            - np.real(h1 @ b[0] @ h1.conj().T)[0, 0],
        ],
    )
    try:
        _, (blocks, _), status = solve_sdp(prob)
    except SolverFailureError:
        status = "numerical-failure"
    if status == "optimal":
        pair = CovariancePair(qa=blocks[0], qj=blocks[1]).clipped()
        if eigenvalue_ratio(pair.qa) <= ratio_threshold:
            return pair
    # fall back to the dominant direction of the relaxed solution
    if inner is None:
        raise SolverFailureError(
            f"rank-one recovery failed at tau={tau:.6g}",
            diagnostics={"tau": tau, "status": status},
        )
    relaxed = inner.descaled()
    w, v = np.linalg.eigh(relaxed.qa)
    qa = w[-1] * np.outer(v[:, -1], v[:, -1].conj())
    return CovariancePair(qa=qa, qj=relaxed.qj).clipped()


def eigenvalue_ratio(q: np.ndarray) -> float:
    """lambda_2 / lambda_1 of a hermitian PSD matrix; 0 for (near) rank one
    or 1x1 input."""
    if q.shape[0] < 2:
        return 0.0
    w = np.linalg.eigvalsh((q + q.conj().T) / 2.0)
    if w[-1] <= 0.0:
        return 0.0
    return float(max(w[-2], 0.0) / w[-1])


def _tau_grid(p: float, h1: np.ndarray, n: int) -> np.ndarray:
    """tau = 0 plus points log-spaced (linear in dB) up to p |h1|^2."""
    tau_ub = p * float(np.linalg.norm(h1) ** 2)
    if tau_ub <= 0.0:
        return np.zeros(1)
    db = np.linspace(-60.0, 0.0, n - 1)
    return np.concatenate([[0.0], tau_ub * 10.0 ** (db / 10.0)])


def misome_secrecy_capacity(ch: WiretapChannel, p: float,
                            cfg: TwoLayerConfig | None = None) -> SecrecyResult:
    """Secrecy capacity for a single-antenna legitimate receiver.

    Outer grid over the eavesdropper SINR cap tau with golden-section
    refinement in the best bracketing cell; the inner SDP supplies f(tau)
    and the reported covariances come from the rank-one recovery at the
    best tau found.
    """
    _require_miso(ch)
    if p <= 0:
        raise InvalidInputError(f"power budget must be positive, got {p}")
    cfg = cfg or TwoLayerConfig()

    cache: dict[float, tuple[float, CharnesCooperSolution]] = {}
    failures = 0

    def evaluate(tau: float):
        nonlocal failures
        if tau in cache:
            return cache[tau]
        try:
            sol = inner_sdp_f_tau(ch, p, tau)
            obj = math.log2(1.0 + sol.f_tau) - math.log2(1.0 + tau)
        except SolverFailureError:
            failures += 1
            sol, obj = None, -math.inf
        cache[tau] = (obj, sol)
        return cache[tau]

    grid = _tau_grid(p, ch.h1, cfg.grid_points)
    objs = np.array([evaluate(t)[0] for t in grid])
    if not np.any(np.isfinite(objs)):
        raise SolverFailureError(
            "all inner solves failed",
            diagnostics={"power": p, "failures": failures},
        )
    best = int(np.argmax(objs))

    # golden-section refinement inside the cell bracketing the best point
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = evaluate(x1)[0], evaluate(x2)[0]
    for _ in range(cfg.refinement_iters):
        if b - a <= 1e-3 * max(1.0, b):
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = evaluate(x1)[0]
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = evaluate(x2)[0]

    tau_star, (obj_star, sol_star) = max(
        ((t, v) for t, v in cache.items() if v[1] is not None),
        key=lambda item: item[1][0],
    )

    relaxed = sol_star.descaled()
    ratio = eigenvalue_ratio(relaxed.qa)
    refined = ratio > cfg.rank_one_ratio
    if refined:
        pair = power_min_rank_one(ch, tau_star, sol_star.f_tau, inner=sol_star,
                                  ratio_threshold=cfg.rank_one_ratio)
    else:
        pair = relaxed
    result = make_secrecy_result(ch, pair, diagnostics={
        "tau_star": float(tau_star),
        "outer_objective": float(obj_star),
        "f_tau": float(sol_star.f_tau),
        "evaluations": len(cache),
        "inner_failures": failures,
        "rank_one_ratio": eigenvalue_ratio(pair.qa),
        "refined": refined,
    })
    return result


# --- alignment closed form -------------------------------------------------

@dataclass
class AlignmentClosedForm:
    """Optimal power split along the alignment directions.

    x_star of the budget goes to the source beam, the rest to the jamming
    beam; cs_sub = log2 of the maximized rate ratio eta.  The quadratic-form
    coefficients (kappa, coef_a, coef_b, y0) document the interior optimum
    eta(y) = kappa - (coef_a * y + coef_b / y), y0 = sqrt(coef_b / coef_a).
    """

    a: float
    b: float
    c: float
    p: float
    x_star: float
    cs_sub: float
    y0: float
    kappa: float
    coef_a: float
    coef_b: float
    v_o: np.ndarray | None = None
    w_full: np.ndarray | None = None

    def covariances(self) -> CovariancePair:
        qa = self.x_star * np.outer(self.v_o, self.v_o.conj())
        qj = (self.p - self.x_star) * np.outer(self.w_full, self.w_full.conj())
        return CovariancePair(qa=qa, qj=qj)

    def eta(self, x):
        x = np.asarray(x, dtype=float)
        return ((1.0 + self.a * x) * (1.0 + self.c * (self.p - x))
                / (1.0 + self.c * self.p + (self.b - self.c) * x))


def _split_closed_form(a: float, b: float, c: float, p: float):
    """Maximize eta(x) over x in [0, p]; returns (x_star, eta_max, y0,
    kappa, coef_a, coef_b).  Requires b != c."""
    y_base = 1.0 + c * p
    q = a * y_base + c - b
    den = (c - b) ** 2
    kappa = (a * b * y_base + c * q) / den
    coef_a = a * c / den
    coef_b = b * y_base * q / den
    alpha, beta = min(b, c), max(b, c)
    if coef_b > 0.0:
        y0 = math.sqrt(coef_b / coef_a)
        if 1.0 + alpha * p <= y0 <= 1.0 + beta * p:
            eta_max = kappa - 2.0 * math.sqrt(coef_a * coef_b)
            x_star = (y0 - y_base) / (b - c)
            return x_star, eta_max, y0, kappa, coef_a, coef_b
    else:
        y0 = 0.0
    # endpoint comparison: eta(0) = 1, eta(p) = (1 + a p) / (1 + b p)
    eta_p = (1.0 + a * p) / (1.0 + b * p)
    if eta_p > 1.0:
        return p, eta_p, y0, kappa, coef_a, coef_b
    return 0.0, 1.0, y0, kappa, coef_a, coef_b


def alignment_closed_form(ch: WiretapChannel, p: float) -> AlignmentClosedForm:
    """Closed-form best power split along the alignment beams.

    The source beam v_o leaks into the eavesdropper subspace already jammed
    by the helper beam, so the eavesdropper rate saturates and the secrecy
    rate log2(eta_max) grows with full slope in log2(p).
    """
    _require_miso(ch)
    if p <= 0:
        raise InvalidInputError(f"power budget must be positive, got {p}")
    v_o, w_o, gamma = misome_alignment_directions(ch)
    w_full = gamma @ w_o
    h2_bar = ch.h2 @ gamma
    a = float(np.linalg.norm(ch.h1 @ v_o) ** 2)
    b = float(np.linalg.norm(ch.g1 @ v_o) ** 2)
    c = float(np.linalg.norm(h2_bar @ w_o) ** 2)

    if abs(b - c) < 1e-8 * max(b, c):
        # the closed form divides by c - b; fall back to a dense grid
        xs = np.linspace(0.0, p, 200001)
        probe = AlignmentClosedForm(a=a, b=b, c=c, p=p, x_star=0.0, cs_sub=0.0,
                                    y0=0.0, kappa=0.0, coef_a=0.0, coef_b=0.0)
        etas = probe.eta(xs)
        i = int(np.argmax(etas))
        x_star, eta_max = float(xs[i]), float(etas[i])
        y0 = kappa = coef_a = coef_b = float("nan")
    else:
        x_star, eta_max, y0, kappa, coef_a, coef_b = _split_closed_form(a, b, c, p)

    return AlignmentClosedForm(
        a=a, b=b, c=c, p=p, x_star=x_star,
        cs_sub=math.log2(max(eta_max, 1.0)),
        y0=y0, kappa=kappa, coef_a=coef_a, coef_b=coef_b,
        v_o=v_o, w_full=w_full,
    )


# --- zero-forcing baseline -------------------------------------------------

def zf_baseline(ch: WiretapChannel, p: float,
                grid_points: int = 4001) -> SecrecyResult:
    """Match the source beam to the receiver channel and jam isotropically
    in the helper's receiver-null space; the power split is found by a dense
    one-dimensional search.  A single-antenna helper has no null space and
    degrades to no jamming at all."""
    _require_miso(ch)
    if p <= 0:
        raise InvalidInputError(f"power budget must be positive, got {p}")
    na, _, ne, nj = ch.config
    h1n = float(np.linalg.norm(ch.h1))
    v = ch.h1.conj().T.ravel() / h1n
    from .linalg import null_space_basis
    z = null_space_basis(ch.g2)
    m = z.shape[1]

    g1v = (ch.g1 @ v).ravel()
    xs = np.linspace(0.0, p, grid_points)
    if m == 0:
        leak = np.linalg.norm(g1v) ** 2
        re = np.log2(1.0 + xs * leak)
    else:
        base = ch.h2 @ z
        d, u = np.linalg.eigh(base @ base.conj().T)
        g_t = np.abs(u.conj().T @ g1v) ** 2
        # eavesdropper SINR of the rank-one beam under isotropic jamming
        denom = 1.0 + np.outer(p - xs, d) / m
        re = np.log2(1.0 + (g_t / denom).sum(axis=1) * xs)
    rd = np.log2(1.0 + xs * h1n ** 2)
    cs = rd - re
    i = int(np.argmax(cs))
    x = float(xs[i])
    qa = x * np.outer(v, v.conj())
    qj = ((p - x) / m) * (z @ z.conj().T) if m else np.zeros((nj, nj), complex)
    return make_secrecy_result(ch, CovariancePair(qa=qa, qj=qj),
                               diagnostics={"x_star": x, "grid": grid_points,
                                            "null_dim": m})
