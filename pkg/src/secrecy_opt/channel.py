"""Wiretap-channel data model, Rayleigh sampling and rate formulas.

All reported rates are in bits per channel use (log base 2); noise at both
receivers is unit-covariance and is baked into the rate expressions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError

#: Covariance eigenvalues down to ``-PSD_TOL * trace`` are accepted as noise.
PSD_TOL = 1e-9


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts at source (na), legitimate receiver (nb),
    eavesdropper (ne) and helper (nj)."""

    na: int
    nb: int
    ne: int
    nj: int

    def __post_init__(self):
        for name in ("na", "nb", "ne", "nj"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise InvalidInputError(f"{name} must be a positive integer, got {v!r}")

    def __iter__(self):
        return iter((self.na, self.nb, self.ne, self.nj))


@dataclass(frozen=True)
class WiretapChannel:
    """The four channel matrices of the helper-assisted wiretap channel.

    h1: source -> legitimate receiver (nb x na)
    g1: source -> eavesdropper        (ne x na)
    g2: helper -> legitimate receiver (nb x nj)
    h2: helper -> eavesdropper        (ne x nj)
    """

    h1: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    h2: np.ndarray
    config: AntennaConfig

    def __post_init__(self):
        na, nb, ne, nj = self.config
        expected = {"h1": (nb, na), "g1": (ne, na), "g2": (nb, nj), "h2": (ne, nj)}
        for name, shape in expected.items():
            m = getattr(self, name)
            if np.asarray(m).shape != shape:
                raise DimensionMismatchError(
                    f"{name} has shape {np.asarray(m).shape}, expected {shape}"
                )
            object.__setattr__(self, name, np.asarray(m, dtype=complex))


def sample_channel(config: AntennaConfig, seed) -> WiretapChannel:
    """Draw an i.i.d. Rayleigh-fading channel, entries CN(0, 1).

    Deterministic per (config, seed); matrices are drawn in the order
    h1, g1, g2, h2.
    """
    rng = np.random.default_rng(seed)
    na, nb, ne, nj = config

    def cn(rows, cols):
        return (rng.standard_normal((rows, cols))
                + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)

    return WiretapChannel(
        h1=cn(nb, na), g1=cn(ne, na), g2=cn(nb, nj), h2=cn(ne, nj), config=config
    )


@dataclass
class CovariancePair:
    """Transmit covariances at the source (qa) and the helper (qj)."""

    qa: np.ndarray
    qj: np.ndarray

    def __post_init__(self):
        self.qa = np.asarray(self.qa, dtype=complex)
        self.qj = np.asarray(self.qj, dtype=complex)

    def total_power(self) -> float:
        return float(np.real(np.trace(self.qa) + np.trace(self.qj)))

    def validate(self, budget: float | None = None):
        """Raise InvalidInputError unless both blocks are hermitian PSD (to
        tolerance) and the joint trace respects the budget."""
        for name, q in (("qa", self.qa), ("qj", self.qj)):
            if q.shape[0] != q.shape[1]:
                raise InvalidInputError(f"{name} must be square, got {q.shape}")
            if np.linalg.norm(q - q.conj().T) > 1e-8 * max(1.0, np.linalg.norm(q)):
                raise InvalidInputError(f"{name} is not hermitian")
            if q.size:
                ev_min = float(np.linalg.eigvalsh(q)[0])
                tr = float(np.real(np.trace(q)))
                if ev_min < -PSD_TOL * max(tr, 1.0):
                    raise InvalidInputError(
                        f"{name} is not PSD: min eigenvalue {ev_min:.3e}"
                    )
        if budget is not None and self.total_power() > budget * (1.0 + 1e-8):
            raise InvalidInputError(
                f"trace budget exceeded: {self.total_power():.6g} > {budget:.6g}"
            )
        return self

    def clipped(self) -> "CovariancePair":
        """Copy with small negative eigenvalue noise clipped to zero."""
        def clip(q):
            if q.size == 0:
                return q
            w, v = np.linalg.eigh((q + q.conj().T) / 2.0)
            return (v * np.maximum(w, 0.0)) @ v.conj().T
        return CovariancePair(qa=clip(self.qa), qj=clip(self.qj))


@dataclass
class SecrecyResult:
    """Rates achieved by a covariance pair, plus solver metadata."""

    rd: float
    re: float
    cs: float
    covariances: CovariancePair
    diagnostics: dict = field(default_factory=dict)


def _logdet(a: np.ndarray) -> float:
    sign, val = np.linalg.slogdet(a)
    if sign.real <= 0:
        return -np.inf
    return float(val)


def _rate(hm: np.ndarray, gm: np.ndarray, qa: np.ndarray, qj: np.ndarray) -> float:
    """log2 det(I + (I + gm qj gm^H)^{-1} hm qa hm^H), evaluated via a solve."""
    nr = hm.shape[0]
    noise = np.eye(nr) + gm @ qj @ gm.conj().T
    signal = hm @ qa @ hm.conj().T
    val = _logdet(np.eye(nr) + np.linalg.solve(noise, signal)) / np.log(2.0)
    return max(val, 0.0)


def rate_legitimate(ch: WiretapChannel, cov: CovariancePair) -> float:
    """Rate of the source -> legitimate-receiver link under helper jamming."""
    cov.validate()
    return _rate(ch.h1, ch.g2, cov.qa, cov.qj)


def rate_eavesdropper(ch: WiretapChannel, cov: CovariancePair) -> float:
    """Rate the eavesdropper can extract, with helper jamming as noise."""
    cov.validate()
    return _rate(ch.g1, ch.h2, cov.qa, cov.qj)


def secrecy_rate(ch: WiretapChannel, cov: CovariancePair) -> float:
    """max(rate_legitimate - rate_eavesdropper, 0)."""
    return max(rate_legitimate(ch, cov) - rate_eavesdropper(ch, cov), 0.0)


def make_secrecy_result(ch: WiretapChannel, cov: CovariancePair,
                        diagnostics: dict | None = None) -> SecrecyResult:
    rd = rate_legitimate(ch, cov)
    re = rate_eavesdropper(ch, cov)
    return SecrecyResult(rd=rd, re=re, cs=max(rd - re, 0.0),
                         covariances=cov, diagnostics=diagnostics or {})


# --- channel file format ---------------------------------------------------

_MATRICES = ("h1", "g1", "g2", "h2")


def channel_to_dict(ch: WiretapChannel) -> dict:
    doc = {"na": ch.config.na, "nb": ch.config.nb,
           "ne": ch.config.ne, "nj": ch.config.nj}
    for name in _MATRICES:
        m = getattr(ch, name)
        doc[f"{name}_re"] = np.real(m).tolist()
        doc[f"{name}_im"] = np.imag(m).tolist()
    return doc


def channel_from_dict(doc: dict) -> WiretapChannel:
    try:
        config = AntennaConfig(na=int(doc["na"]), nb=int(doc["nb"]),
                               ne=int(doc["ne"]), nj=int(doc["nj"]))
    except KeyError as exc:
        raise InvalidInputError(f"channel document missing key {exc}") from exc
    mats = {}
    for name in _MATRICES:
        try:
            re_part = np.asarray(doc[f"{name}_re"], dtype=float)
            im_part = np.asarray(doc[f"{name}_im"], dtype=float)
        except KeyError as exc:
            raise InvalidInputError(f"channel document missing key {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(f"matrix {name} is not numeric: {exc}") from exc
        if re_part.shape != im_part.shape or re_part.ndim != 2:
            raise InvalidInputError(f"matrix {name} has inconsistent parts")
        mats[name] = re_part + 1j * im_part
    return WiretapChannel(config=config, **mats)


def save_channel(ch: WiretapChannel, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(channel_to_dict(ch), fh, indent=1)


def load_channel(path) -> WiretapChannel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read channel file {path}: {exc}") from exc
    return channel_from_dict(doc)
