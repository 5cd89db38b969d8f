"""Closed-form secure degrees of freedom and alignment precoder factory.

The precoder constructions place the jamming and message signals into
prescribed subspaces: separated at the legitimate receiver, overlapping at
the eavesdropper.  Four cases are dispatched on the antenna counts; the
geometric work is done by the joint factorization in :mod:`.linalg`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import AntennaConfig, WiretapChannel
from .errors import DegenerateChannelError, InfeasibleConfigError
from .linalg import (
    gsvd_transform,
    null_space_basis,
    numeric_rank,
    span_contained,
    span_intersection_trivial,
)


@dataclass(frozen=True)
class SdofBreakdown:
    """Decomposition of the maximal secure degrees of freedom into the
    no-leakage part (d0), the helper-nulled part (d1) and the paired
    common-subspace part (d2)."""

    d0: int
    d1: int
    d2: int
    s: int
    d_star: int


@dataclass
class PrecoderPair:
    """Source precoder v (na x ka) and helper precoder w (nj x kj); either
    may have zero columns."""

    v: np.ndarray
    w: np.ndarray


def sdof_closed_form(config: AntennaConfig) -> SdofBreakdown:
    """Closed-form maximal secure degrees of freedom.

    The evaluation order d0 -> d1 -> s -> d2 matters: the common-subspace
    dimension s is measured after the first d0 + d1 source dimensions have
    been spent.
    """
    na, nb, ne, nj = config
    d0 = max(na - ne, 0)
    d1 = max(min(na, ne) + max(nj - nb, 0) - ne, 0)
    rem = na - (d0 + d1)
    s = min(rem, ne) + min(nj, ne) - min(rem + nj, ne)
    d2 = min(s, max(math.floor((nb - (d0 + d1)) / 2), 0))
    d_star = min(d0 + d1 + d2, na, nb)
    return SdofBreakdown(d0=d0, d1=d1, d2=d2, s=s, d_star=d_star)


def sdof_table_lookup(config: AntennaConfig) -> SdofBreakdown:
    """Row-by-row evaluation of the closed-form summary table; independent
    of :func:`sdof_closed_form` and used as its oracle."""
    na, nb, ne, nj = config
    if na >= ne + nb or nj >= ne + nb or (
            2 * nb + ne - nj <= na < ne + nb and nb < nj < ne + nb):
        s = 0  # the table does not split these rows into components
        d_star = min(na, nb)
    elif nb + ne - nj < na < 2 * nb + ne - nj and nb < nj < ne + nb:
        s = min(nb + ne - nj, ne) + min(nj, ne) - ne
        d_star = na + nj - (nb + ne) + min(
            s, math.floor((2 * nb + ne - na - nj) / 2))
    elif ne < na < ne + nb and nj <= nb:
        s = min(nj, ne)
        d_star = na - ne + min(s, math.floor((nb + ne - na) / 2))
    elif (na <= nb + ne - nj and nb < nj < ne + nb) or (na <= ne and nj <= nb):
        s = min(na, ne) + min(nj, ne) - min(na + nj, ne)
        d_star = min(s, math.floor(nb / 2))
    else:
        raise AssertionError(f"no table row matches config {tuple(config)}")
    return SdofBreakdown(d0=0, d1=0, d2=0, s=s, d_star=d_star)


def positive_sdof_condition(config: AntennaConfig) -> bool:
    """Antenna-count condition for strictly positive secure degrees of
    freedom: ne < na + nj - 1 for a single-antenna receiver, ne < na + nj
    otherwise."""
    na, nb, ne, nj = config
    if nb == 1:
        return ne < na + nj - 1
    return ne < na + nj


@dataclass
class AlignmentReport:
    """Outcome of the alignment feasibility check, one flag per constraint."""

    eavesdropper_aligned: bool       # span(g1 v) inside span(h2 w)
    receiver_separated: bool         # span(g2 w) meets span(h1 v) only at 0
    message_visible: bool | None     # |h1 v| > 0, checked when nb == 1

    def __bool__(self):
        ok = self.eavesdropper_aligned and self.receiver_separated
        if self.message_visible is not None:
            ok = ok and self.message_visible
        return ok


def verify_alignment(ch: WiretapChannel, pair: PrecoderPair,
                     tol: float = 1e-8) -> AlignmentReport:
    """Check the two alignment constraints (and message visibility for a
    single-antenna receiver) at the given rank tolerance."""
    v, w = np.asarray(pair.v, dtype=complex), np.asarray(pair.w, dtype=complex)

    def gain(m, x):
        # magnitude a generic product m @ x would have; keeps roundoff-zero
        # products from registering as genuine directions
        if x.size == 0:
            return 0.0
        return float(np.linalg.norm(m, 2) * np.linalg.norm(x, 2))

    scale_e = max(gain(ch.g1, v), gain(ch.h2, w))
    scale_b = max(gain(ch.g2, w), gain(ch.h1, v))
    aligned = span_contained(ch.g1 @ v, ch.h2 @ w, tol, scale=scale_e)
    separated = span_intersection_trivial(ch.g2 @ w, ch.h1 @ v, tol,
                                          scale=scale_b)
    visible = None
    if ch.config.nb == 1:
        visible = bool(np.linalg.norm(ch.h1 @ v) > tol)
    return AlignmentReport(eavesdropper_aligned=aligned,
                           receiver_separated=separated,
                           message_visible=visible)


def _empty(rows: int) -> np.ndarray:
    return np.zeros((rows, 0), dtype=complex)


def _hstack(rows: int, *blocks: np.ndarray) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[1] > 0]
    if not blocks:
        return _empty(rows)
    return np.hstack(blocks)


def alignment_precoders(ch: WiretapChannel, tol: float = 1e-9) -> PrecoderPair:
    """Closed-form precoder pair achieving the maximal secure degrees of
    freedom on a generic channel.

    Raises DegenerateChannelError when a rank collapse of the (assumed
    generic) channel breaks the construction, and InfeasibleConfigError when
    the maximal secure degrees of freedom are zero.
    """
    na, nb, ne, nj = ch.config
    breakdown = sdof_closed_form(ch.config)
    if breakdown.d_star == 0:
        raise InfeasibleConfigError(
            f"config {tuple(ch.config)} has zero secure degrees of freedom"
        )

    if na >= ne + nb:
        # Source alone can hide from the eavesdropper.
        v = null_space_basis(ch.g1, tol)
        w = _empty(nj)
    elif nj >= ne + nb:
        # Helper alone can flood the eavesdropper while staying invisible.
        w = null_space_basis(ch.g2, tol)
        _, _, vh = np.linalg.svd(ch.h1)
        v = vh.conj().T[:, : min(na, nb)]
    elif nb < nj:  # na < ne + nb, nb < nj < ne + nb
        v, w = _case_helper_strong(ch, breakdown, tol)
    else:  # na < ne + nb, nj <= nb
        v, w = _case_helper_weak(ch, breakdown, tol)

    pair = PrecoderPair(v=v, w=w)
    rank_target = breakdown.d_star
    achieved = numeric_rank(ch.h1 @ pair.v, tol=1e-8)
    report = verify_alignment(ch, pair)
    if achieved != rank_target or not report:
        raise DegenerateChannelError(
            f"alignment construction failed on config {tuple(ch.config)}: "
            f"rank {achieved} (target {rank_target}), report {report}"
        )
    return pair


def _case_helper_strong(ch: WiretapChannel, breakdown: SdofBreakdown, tol):
    """nb < nj < ne + nb: jam from the helper's receiver-null space, pairing
    common directions of the reduced channels; fall through to a second
    pairing stage when the receiver still has spare dimensions."""
    na, nb, ne, nj = ch.config
    d0 = breakdown.d0
    v0 = null_space_basis(ch.g1, tol)
    if v0.shape[1] != d0:
        raise DegenerateChannelError("null(g1) has unexpected dimension")
    gamma = null_space_basis(ch.g2, tol)
    if gamma.shape[1] != nj - nb:
        raise DegenerateChannelError("null(g2) has unexpected dimension")
    h2_bar = ch.h2 @ gamma
    v0c = null_space_basis(v0.conj().T, tol)
    g1_bar = ch.g1 @ v0c

    f3 = gsvd_transform(h2_bar, g1_bar, tol)
    d1 = f3.s
    c3 = f3.r + (na - d0) - f3.k
    if d0 + d1 >= nb:
        take = nb - d0
        w1 = gamma @ f3.psi1[:, f3.r: f3.r + take]
        v1 = v0c @ f3.psi2[:, c3: c3 + take]
        return _hstack(na, v0, v1), w1

    w1 = gamma @ f3.psi1[:, f3.r: f3.r + d1]
    v1 = v0c @ f3.psi2[:, c3: c3 + d1]
    v01c = null_space_basis(_hstack(na, v0, v1).conj().T, tol)
    g1_tilde = ch.g1 @ v01c
    f4 = gsvd_transform(ch.h2, g1_tilde, tol)
    d2 = min(f4.s, (nb - d0 - d1) // 2)
    c4 = f4.r + (na - d0 - d1) - f4.k
    w2 = f4.psi1[:, f4.r: f4.r + d2]
    v2 = v01c @ f4.psi2[:, c4: c4 + d2]
    return _hstack(na, v0, v1, v2), _hstack(nj, w1, w2)


def _case_helper_weak(ch: WiretapChannel, breakdown: SdofBreakdown, tol):
    """nj <= nb: no receiver-null jamming available; pair common directions
    of the full helper-eavesdropper channel with the leakage channel."""
    na, nb, ne, nj = ch.config
    d0 = breakdown.d0
    v0 = null_space_basis(ch.g1, tol)
    if v0.shape[1] != d0:
        raise DegenerateChannelError("null(g1) has unexpected dimension")
    v0c = null_space_basis(v0.conj().T, tol)
    g1_bar = ch.g1 @ v0c
    f4 = gsvd_transform(ch.h2, g1_bar, tol)
    d2 = min(f4.s, (nb - d0) // 2)
    c4 = f4.r + (na - d0) - f4.k
    w2 = f4.psi1[:, f4.r: f4.r + d2]
    v2 = v0c @ f4.psi2[:, c4: c4 + d2]
    return _hstack(na, v0, v2), w2


def misome_alignment_directions(ch: WiretapChannel, tol: float = 1e-9):
    """Beamforming directions for a single-antenna receiver.

    Returns (v_o, w_o, gamma): a unit source direction, a unit direction in
    the helper's receiver-null space coordinates, and the null-space basis
    gamma itself, such that span(g1 v_o) equals span(h2 gamma w_o) while
    g2 gamma w_o = 0.
    """
    na, nb, ne, nj = ch.config
    if nb != 1:
        raise InfeasibleConfigError("directions are defined for nb = 1 only")
    if nj < 2:
        raise InfeasibleConfigError("a single-antenna helper cannot null itself")
    if ne >= na + nj - 1:
        raise InfeasibleConfigError(
            f"ne={ne} >= na+nj-1={na + nj - 1}: alignment infeasible"
        )
    gamma = null_space_basis(ch.g2, tol)
    if gamma.shape[1] != nj - 1:
        raise DegenerateChannelError("null(g2) has unexpected dimension")
    h2_bar = ch.h2 @ gamma
    f = gsvd_transform(h2_bar, ch.g1, tol)
    if f.s < 1:
        raise DegenerateChannelError("no common direction found (rank collapse)")
    i = f.r  # first admissible column of the common block
    w_o = f.psi1[:, i]
    v_o = f.psi2[:, i + na - f.k]
    w_o = w_o / np.linalg.norm(w_o)
    v_o = v_o / np.linalg.norm(v_o)
    return v_o, w_o, gamma
