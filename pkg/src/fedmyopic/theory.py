"""Computable recovery and impossibility conditions."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .consensus import noise_proxy, signed_consensus
from .errors import InputError
from .signed_graph import ENUMERATION_CAP, signed_edge_expansion


@dataclass(frozen=True)
class RecoveryConditionReport:
    phi_bar: float
    noise: float
    threshold: float
    satisfied: bool
    failure_probability_bound: float | None
    log_n: float
    # the unscaled (phi^2 - phi log n) / log n quantity, up to constants
    order_rhs: float
    phi_exhaustive: bool = True

    def to_dict(self):
        return asdict(self)


def recovery_threshold(phi, n):
    """``(3 phi^2 - 8 phi log n) / (48 log n)``."""
    log_n = math.log(n)
    return (3 * phi * phi - 8 * phi * log_n) / (48 * log_n)


def recovery_condition(model, cap=ENUMERATION_CAP):
    """Check the sufficient condition for exact recovery with probability ``>= 1 - 2/n``.

    Satisfied when the signed consensus graph has positive edge expansion and
    ``4 * noise <= (3 phi^2 - 8 phi log n) / (48 log n)``.
    """
    n = model.n
    if n <= 1:
        raise InputError("recovery condition needs n >= 2")
    rep = signed_edge_expansion(signed_consensus(model), cap=cap)
    phi = rep.phi_g
    noise = noise_proxy(model)
    log_n = math.log(n)
    threshold = recovery_threshold(phi, n)
    ok = phi > 0 and 4 * noise <= threshold
    return RecoveryConditionReport(
        phi_bar=phi,
        noise=noise,
        threshold=threshold,
        satisfied=ok,
        failure_probability_bound=2.0 / n if ok else None,
        log_n=log_n,
        order_rhs=(phi * phi - phi * log_n) / log_n,
        phi_exhaustive=rep.exhaustive,
    )


def client_signal_coeffs(spec):
    """``(s_plus, s_minus)``: edge-report probabilities within / across groups."""
    p, q, r = spec.p, spec.q, spec.r
    return p + r - 2 * p * r, q + r - 2 * q * r


def kl_bernoulli(a, b):
    """``KL(Bern(a) || Bern(b))`` in nats, with ``0 log 0 = 0``."""
    total = 0.0
    for x, y in ((a, b), (1 - a, 1 - b)):
        if x == 0:
            continue
        if y == 0:
            return math.inf
        total += x * math.log(x / y)
    return total


@dataclass(frozen=True)
class ImpossibilityReport:
    s_plus: float
    s_minus: float
    kl_ratio: float
    threshold: float
    kl_max: float
    fano_bound: float
    impossible: bool
    n_k: int
    fov_size: int

    def to_dict(self):
        return asdict(self)


def impossibility_condition(spec, n_k, fov_size=None):
    """Fano-type lower bound on any estimator of one client's local structure.

    ``kl_ratio = (1-2r)^2 (p-q)^2 / min(s+(1-s+), s-(1-s-))``; recovery is
    impossible with probability at least 1/2 once
    ``kl_ratio <= n_k / (2 |fov|)``. ``fano_bound`` evaluates
    ``1 - (|fov| KL_max + log 2) / (n_k log 2)`` with the exact divergences.
    """
    m = len(spec.fov) if fov_size is None else int(fov_size)
    n_k = int(n_k)
    if n_k < 1 or m < 1:
        raise InputError(f"need n_k >= 1 and |fov| >= 1, got n_k={n_k}, |fov|={m}")
    s_plus, s_minus = client_signal_coeffs(spec)
    signal = (1 - 2 * spec.r) ** 2 * (spec.p - spec.q) ** 2
    denom = min(s_plus * (1 - s_plus), s_minus * (1 - s_minus))
    if denom > 0:
        kl_ratio = signal / denom
    else:
        kl_ratio = 0.0 if signal == 0 else math.inf
    threshold = n_k / (2 * m)
    kl_max = max(kl_bernoulli(s_plus, s_minus), kl_bernoulli(s_minus, s_plus))
    fano = 1 - (m * kl_max + math.log(2)) / (n_k * math.log(2))
    return ImpossibilityReport(
        s_plus=s_plus,
        s_minus=s_minus,
        kl_ratio=kl_ratio,
        threshold=threshold,
        kl_max=kl_max,
        fano_bound=fano,
        impossible=kl_ratio <= threshold,
        n_k=n_k,
        fov_size=m,
    )
