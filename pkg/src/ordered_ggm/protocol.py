"""Ordered transmissions from cluster heads to the fusion center.

Cluster head ``k`` transmits ``L_k`` after a delay ``eta / |L_k|``, so values
arrive in decreasing magnitude. After the ``t``-th reception the fusion center
knows that each of the ``K - t`` outstanding values is at most ``|L~_t|`` in
magnitude and stops as soon as the running sum ``L'`` satisfies

    L' >= 2 tau + (K - t) |L~_t|   -> H1
    L' <  2 tau - (K - t) |L~_t|   -> H0

which guarantees the same decision as summing all ``K`` values.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .errors import EquivalenceViolation
from .statistic import Decision, bayes_threshold, centralized_decide, local_stats


@dataclass(frozen=True)
class ProtocolTrace:
    order: tuple
    received: tuple
    running_sums: tuple
    thresholds: tuple
    timers: tuple
    stop_index: int
    decision: Decision
    saved: int
    eta: float
    stop_broadcasts: int

    @property
    def K(self):
        return len(self.order)

    def to_dict(self):
        d = asdict(self)
        d["decision"] = self.decision.name
        d["timers"] = [t if math.isfinite(t) else None for t in self.timers]
        return d


def run_ordered(local_values, tau, eta=1.0):
    """Simulate one protocol run on the local statistics ``local_values``.

    Cluster indices in the trace are 1-based.
    """
    vals = [float(v) for v in local_values]
    K = len(vals)
    if K == 0:
        raise ValueError("protocol: need at least one local value")
    if not all(math.isfinite(v) for v in vals):
        raise ValueError("protocol: local values must be finite")
    if not eta > 0:
        raise ValueError("protocol: eta must be positive")

    two_tau = 2.0 * tau
    order = sorted(range(K), key=lambda i: (-abs(vals[i]), i))
    timers = tuple(eta / abs(vals[i]) if vals[i] != 0 else math.inf for i in order)

    partial = 0.0
    sums, thresholds = [], []
    decision = None
    for t, i in enumerate(order, start=1):
        v = vals[i]
        partial = partial + v
        rem = float(K - t)
        upper = two_tau + rem * abs(v)
        lower = two_tau - rem * abs(v)
        sums.append(partial)
        thresholds.append((upper, lower))
        if partial >= upper:
            decision = Decision.H1
        elif partial < lower:
            decision = Decision.H0
        if decision is not None:
            break

    stop = len(sums)
    return ProtocolTrace(
        order=tuple(i + 1 for i in order),
        received=tuple(i + 1 for i in order[:stop]),
        running_sums=tuple(sums),
        thresholds=tuple(thresholds),
        timers=timers,
        stop_index=stop,
        decision=decision,
        saved=K - stop,
        eta=float(eta),
        stop_broadcasts=1 if stop < K else 0,
    )


def run_batch(values, tau):
    """Stop indices and decisions for many runs at once (rows of ``values``)."""
    return kernels.ordered_stops(np.asarray(values, dtype=np.float64), 2.0 * float(tau))


def verify_equivalence(scenario, lset, x, eta=1.0):
    """Run the protocol and the centralized test on ``x``.

    Returns ``(trace, centralized_decision, agreement)`` and raises
    :class:`EquivalenceViolation` on disagreement.
    """
    tau = bayes_threshold(scenario.priors)
    values = local_stats(lset, x)[0]
    trace = run_ordered(values, tau, eta)
    central = centralized_decide(scenario, x)
    agree = trace.decision == central
    if not agree:
        raise EquivalenceViolation(
            f"protocol: ordered decision {trace.decision.name} != centralized {central.name}"
        )
    return trace, central, agree
