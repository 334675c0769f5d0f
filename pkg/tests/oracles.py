"""Independent reference evaluations used by unit and acceptance tests.

These deliberately re-derive the semantics by enumeration/dense sampling
and never call the algorithms they check.
"""
from fractions import Fraction

from sstl.signals import BooleanSignal


def dense_until_oracle(s1: BooleanSignal, s2: BooleanSignal, t1, t2, t) -> bool:
    """Literal dense-time evaluation of the until semantics at time ``t``.

    There must be a witness time tp in [t+t1, t+t2] where ``s2`` holds with
    ``s1`` holding on the whole closed interval [t, tp].  Piecewise-constant
    signals make it enough to test witness candidates at interval endpoints
    and midpoints between consecutive candidates.
    """
    t1, t2, t = Fraction(t1), Fraction(t2), Fraction(t)
    lo, hi = t + t1, min(t + t2, s1.horizon)
    if lo > hi:
        return False
    candidates = {lo, hi}
    for s in (s1, s2):
        for e in s.endpoints():
            if lo <= e <= hi:
                candidates.add(e)
    ordered = sorted(candidates)
    for a, b in zip(ordered, ordered[1:]):
        candidates.add((a + b) / 2)

    def holds_throughout(signal, start, end):
        probes = {start, end}
        for e in signal.endpoints():
            if start < e < end:
                probes.add(e)
        ordered = sorted(probes)
        for a, b in zip(ordered, ordered[1:]):
            probes.add((a + b) / 2)
        # value_at is false at or past the horizon: no evidence there
        return all(signal.value_at(p) for p in probes)

    for tp in sorted(candidates):
        if tp >= s2.horizon:
            continue
        if s2.value_at(tp) and holds_throughout(s1, t, tp):
            return True
    return False


def sample_points(*signals, shifts=()):
    """Endpoints, shifted endpoints and midpoints: a dense probe set."""
    horizon = signals[0].horizon
    points = {Fraction(0)}
    for s in signals:
        points.update(s.endpoints())
    for shift in shifts:
        points.update(p - Fraction(shift) for p in set(points) if p - Fraction(shift) >= 0)
    points = {p for p in points if 0 <= p < horizon}
    ordered = sorted(points)
    mids = [(a + b) / 2 for a, b in zip(ordered, ordered[1:])]
    return sorted(set(ordered) | set(mids))
