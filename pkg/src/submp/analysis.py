"""Exact threshold integrals and numerical certificates for the rounding analysis.

Every quantity here is an integral over theta of f evaluated on level sets
of the allocation.  Level sets only change at entries of x, so each integral
is a finite sum over the constancy intervals; nothing is sampled.

Vertices are relabelled by ascending alpha_j = max_i x(v_j, i) (stable on
ties), V_j is the prefix {v_1..v_j} of that order and l_j the lowest label
attaining alpha_j.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, VerificationError
from .relaxation import FractionalAllocation, objective
from .rounding import breakpoints, half_outcome, symmetric_outcome, theta_sets

NOISE = 1e-9


@dataclass(frozen=True)
class ThresholdProfile:
    alphas: np.ndarray  # alpha_1 <= ... <= alpha_n in sorted order
    labels: np.ndarray  # l_j, per sorted position
    order: np.ndarray  # order[j-1] = original index of v_j

    def alpha(self, j):
        """alpha_j with sentinels alpha_0 = 0, alpha_{n+1} = 1."""
        if j == 0:
            return 0.0
        if j == len(self.alphas) + 1:
            return 1.0
        return float(self.alphas[j - 1])

    def last_at_most(self, r):
        """Largest j with alpha_j <= r (0 if none)."""
        return int(np.searchsorted(self.alphas, r, side="right"))


def build_profile(x: FractionalAllocation) -> ThresholdProfile:
    alpha = x.x.max(axis=1)
    labels = np.argmax(x.x, axis=1)
    order = np.argsort(alpha, kind="stable")
    return ThresholdProfile(alpha[order], labels[order], order)


class _Levels:
    """Super-level sets {v : y_v >= theta} of one vector, indexed by breakpoint."""

    __slots__ = ("vals", "masks")

    def __init__(self, y):
        vals = sorted({float(t) for t in y if t > 0.0})
        masks = []
        for t in vals:
            m = 0
            for v, yv in enumerate(y):
                if yv >= t:
                    m |= 1 << v
            masks.append(m)
        self.vals = vals
        self.masks = masks

    def mask_at(self, theta):
        idx = bisect_left(self.vals, theta)
        return self.masks[idx] if idx < len(self.vals) else 0

    def integrate(self, g, lo, hi):
        """Integral over (lo, hi] of g(level mask), g taking a bitmask."""
        if hi <= lo:
            return 0.0
        vals, masks = self.vals, self.masks
        total = 0.0
        prev = lo
        idx = bisect_right(vals, lo)
        while idx < len(vals) and vals[idx] < hi:
            total += (vals[idx] - prev) * g(masks[idx])
            prev = vals[idx]
            idx += 1
        total += (hi - prev) * g(masks[idx] if idx < len(vals) else 0)
        return total


@dataclass
class VerificationReport:
    name: str
    lhs: float
    rhs: float
    residual: float
    kind: str = "inequality"  # or "identity"
    tol: float = NOISE
    detail: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        d = self.detail.get("delta")
        return self.name if d is None else f"{self.name}@{d:g}"

    @property
    def ok(self) -> bool:
        if self.kind == "inequality":
            return self.residual >= -self.tol
        worst = max([abs(self.residual)] + [abs(v) for v in self.detail.get("term_errors", [])])
        return worst <= self.tol


class _Context:
    """Per-allocation cache: level structures, prefix masks, f lookups."""

    def __init__(self, x: FractionalAllocation):
        self.x = x
        self.f = x.instance.oracle._f
        self.n, self.k = x.n, x.k
        self.full = (1 << self.n) - 1
        self.profile = build_profile(x)
        self.cols = [_Levels(x.x[:, i].tolist()) for i in range(self.k)]
        prefix = [0]
        for v in self.profile.order.tolist():
            prefix.append(prefix[-1] | 1 << v)
        self.prefix = prefix  # prefix[j] = V_j
        self.all_entries = _Levels(x.x.ravel().tolist())  # breakpoints only

    def sub(self, jp, j):
        """V_{j', j} = {v_j', ..., v_j} (empty if j' > j)."""
        if jp > j:
            return 0
        return self.prefix[j] & ~self.prefix[jp - 1]

    def allocated_mask(self, theta):
        m = 0
        for c in self.cols:
            m |= c.mask_at(theta)
        return m

    def integrate_union(self, g, lo, hi):
        """Integral over (lo, hi] of g(A(theta)), A(theta) the union of level sets."""
        if hi <= lo:
            return 0.0
        vals = self.all_entries.vals
        total = 0.0
        prev = lo
        idx = bisect_right(vals, lo)
        while idx < len(vals) and vals[idx] < hi:
            total += (vals[idx] - prev) * g(self.allocated_mask(vals[idx]))
            prev = vals[idx]
            idx += 1
        total += (hi - prev) * g(self.allocated_mask(hi))
        return total

    @cached_property
    def f_empty(self):
        return self.f(0)


def _ctx(x):
    return x if isinstance(x, _Context) else _Context(x)


def _closed_allocated(c: _Context, r):
    p, f, full = c.profile, c.f, c.full
    h = p.last_at_most(r)
    s = sum(p.alpha(j) * (f(full & ~c.prefix[j - 1]) - f(full & ~c.prefix[j])) for j in range(1, h + 1))
    return s + r * f(full & ~c.prefix[h])


def _closed_unallocated(c: _Context, r):
    p, f = c.profile, c.f
    h = p.last_at_most(r)
    s = sum(p.alpha(j) * (f(c.prefix[j - 1]) - f(c.prefix[j])) for j in range(1, h + 1))
    return s + r * f(c.prefix[h])


def _agree(a, b, what):
    if abs(a - b) > 1e-12 * max(1.0, abs(a), abs(b)):
        raise VerificationError(f"{what}: closed form {a!r} disagrees with direct integration {b!r}")


def _check_r(r):
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"threshold bound must lie in [0, 1], got {r!r}")


def allocated_integral(x, r: float) -> float:
    """Integral of f(A(theta)) over [0, r], closed form checked against direct summation."""
    _check_r(r)
    c = _ctx(x)
    closed = _closed_allocated(c, r)
    direct = c.integrate_union(c.f, 0.0, r)
    _agree(closed, direct, "allocated integral")
    return closed


def unallocated_integral(x, r: float) -> float:
    """Integral of f(U(theta)) over [0, r], closed form checked against direct summation."""
    _check_r(r)
    c = _ctx(x)
    closed = _closed_unallocated(c, r)
    full = c.full
    direct = c.integrate_union(lambda m: c.f(full & ~m), 0.0, r)
    _agree(closed, direct, "unallocated integral")
    return closed


def per_label_integral(x, i: int, delta: float) -> float:
    _check_r(delta)
    c = _ctx(x)
    return c.cols[i].integrate(c.f, 0.0, delta)


def _check_delta(delta, lo=0.5):
    if not lo <= delta <= 1.0:
        raise DomainError(f"delta must lie in [{lo}, 1], got {delta!r}")


def verify_main_theorem(x, delta: float) -> VerificationReport:
    """sum_i int_0^delta f(A(i,t)) >= (k d - d - 1) f(0) + int_0^delta f(A(t)) + int_0^1 f(U(t))."""
    _check_delta(delta)
    c = _ctx(x)
    lhs = sum(col.integrate(c.f, 0.0, delta) for col in c.cols)
    alloc = allocated_integral(c, delta)
    unalloc = unallocated_integral(c, 1.0)
    empty_term = (c.k * delta - delta - 1.0) * c.f_empty
    rhs = empty_term + alloc + unalloc
    return VerificationReport(
        "main",
        lhs,
        rhs,
        lhs - rhs,
        detail={"empty_term": empty_term, "allocated": alloc, "unallocated": unalloc, "delta": delta},
    )


def _label_increment(c: _Context, i, j, delta):
    """int_0^delta f(A(i,t) & V_j) - f(A(i,t) & V_{j-1}) dt."""
    f = c.f
    cur, prev = c.prefix[j], c.prefix[j - 1]
    return c.cols[i].integrate(lambda m: f(m & cur) - f(m & prev), 0.0, delta)


def verify_charging1(x, j: int, delta: float) -> VerificationReport:
    """Non-argmax labels pay at least (1 - alpha_j) (f(V_j) - f(V_{j-1}))."""
    _check_delta(delta)
    c = _ctx(x)
    if not 1 <= j <= c.n:
        raise DomainError(f"vertex position must lie in [1, {c.n}], got {j}")
    lj = int(c.profile.labels[j - 1])
    lhs = sum(_label_increment(c, i, j, delta) for i in range(c.k) if i != lj)
    fj, fj1 = c.f(c.prefix[j]), c.f(c.prefix[j - 1])
    rhs = fj - fj1 + c.profile.alpha(j) * (fj1 - fj)
    return VerificationReport("charging1", lhs, rhs, lhs - rhs, detail={"j": j, "delta": delta})


def verify_charging1_sum(x, delta: float) -> VerificationReport:
    """Summed over j: the non-argmax increments cover int_0^1 f(U) - f(0)."""
    _check_delta(delta)
    c = _ctx(x)
    lhs = 0.0
    worst = np.inf
    for j in range(1, c.n + 1):
        rep = verify_charging1(c, j, delta)
        lhs += rep.lhs
        worst = min(worst, rep.residual)
    rhs = unallocated_integral(c, 1.0) - c.f_empty
    return VerificationReport(
        "charging1_sum", lhs, rhs, lhs - rhs, detail={"delta": delta, "min_term_residual": worst}
    )


def verify_charging2(x, delta: float) -> VerificationReport:
    """Argmax-label increments summed over j cover int_0^delta f(A) - delta f(0)."""
    _check_delta(delta, lo=0.0)
    c = _ctx(x)
    lhs = sum(_label_increment(c, int(c.profile.labels[j - 1]), j, delta) for j in range(1, c.n + 1))
    rhs = allocated_integral(c, delta) - delta * c.f_empty
    return VerificationReport("charging2", lhs, rhs, lhs - rhs, detail={"delta": delta})


def _union_increment(c: _Context, j, lo, hi):
    """int_lo^hi f(A_{j-1}(t) + v_j) - f(A_{j-1}(t)) dt with A(t) the union of level sets."""
    f = c.f
    prev = c.prefix[j - 1]
    vj = c.prefix[j] & ~prev
    return c.integrate_union(lambda m: f((m & prev) | vj) - f(m & prev), lo, hi)


def verify_delta_identity(x) -> VerificationReport:
    """sum_j Delta_j equals sum_j alpha_j (f(V - V_{j-1}) - f(V - V_j)).

    Delta_j is integrated from its definition over [0, alpha_j]; each term
    is also compared with its interval-sum form.
    """
    c = _ctx(x)
    p, f, full, n = c.profile, c.f, c.full, c.n
    deltas = [_union_increment(c, j, 0.0, p.alpha(j)) for j in range(1, n + 1)]
    term_errors = []
    for j in range(1, n + 1):
        form = sum(
            (p.alpha(jp) - p.alpha(jp - 1)) * (f(c.sub(jp, j)) - f(c.sub(jp, j - 1))) for jp in range(1, n + 1)
        )
        term_errors.append(deltas[j - 1] - form)
    lhs = sum(deltas)
    rhs = sum(p.alpha(j) * (f(full & ~c.prefix[j - 1]) - f(full & ~c.prefix[j])) for j in range(1, n + 1))
    return VerificationReport(
        "delta_identity", lhs, rhs, lhs - rhs, kind="identity", detail={"term_errors": term_errors}
    )


def verify_lambda_identity(x, delta: float) -> VerificationReport:
    """Tail version over j > h (alpha_j > delta) of the Delta identity, integrals from delta.

    sum_{j>h} Lambda_j = sum_{j>h} alpha_j (f(V - V_{j-1}) - f(V - V_j)) - delta (f(V - V_h) - f(0)).
    Per term, Lambda_j is compared with
    (alpha_{h+1} - delta)(f(V_{h+1,j}) - f(V_{h+1,j-1})) + sum_{j'>=h+2} (alpha_j' - alpha_{j'-1})(f(V_{j',j}) - f(V_{j',j-1})).
    """
    _check_delta(delta, lo=0.0)
    c = _ctx(x)
    p, f, full, n = c.profile, c.f, c.full, c.n
    h = p.last_at_most(delta)
    lambdas = [_union_increment(c, j, delta, p.alpha(j)) for j in range(h + 1, n + 1)]
    term_errors = []
    for j, lam in zip(range(h + 1, n + 1), lambdas):
        form = (p.alpha(h + 1) - delta) * (f(c.sub(h + 1, j)) - f(c.sub(h + 1, j - 1)))
        form += sum(
            (p.alpha(jp) - p.alpha(jp - 1)) * (f(c.sub(jp, j)) - f(c.sub(jp, j - 1))) for jp in range(h + 2, n + 1)
        )
        term_errors.append(lam - form)
    lhs = sum(lambdas)
    rhs = sum(p.alpha(j) * (f(full & ~c.prefix[j - 1]) - f(full & ~c.prefix[j])) for j in range(h + 1, n + 1))
    rhs -= delta * (f(full & ~c.prefix[h]) - c.f_empty)
    return VerificationReport(
        "lambda_identity",
        lhs,
        rhs,
        lhs - rhs,
        kind="identity",
        detail={"term_errors": term_errors, "h": h, "delta": delta},
    )


def verify_rho_decomposition(x, delta: float) -> VerificationReport:
    """rho_j = sum_i int_0^delta f(A(i,t) & V_j) dt telescopes through the split increments.

    Checks rho_0 = k delta f(0), rho_j - rho_{j-1} = (argmax-label term) +
    (other-label terms) for every j, and rho_n = sum of per-label integrals.
    The residual reported is rho_n - (rho_0 + sum of increments).
    """
    _check_delta(delta, lo=0.0)
    c = _ctx(x)
    f = c.f
    rho = []
    for j in range(c.n + 1):
        vj = c.prefix[j]
        rho.append(sum(col.integrate(lambda m: f(m & vj), 0.0, delta) for col in c.cols))
    term_errors = [rho[0] - c.k * delta * c.f_empty]
    increments = 0.0
    for j in range(1, c.n + 1):
        lj = int(c.profile.labels[j - 1])
        own = _label_increment(c, lj, j, delta)
        others = sum(_label_increment(c, i, j, delta) for i in range(c.k) if i != lj)
        term_errors.append((rho[j] - rho[j - 1]) - (own + others))
        increments += own + others
    lhs = sum(per_label_integral(c, i, delta) for i in range(c.k))
    term_errors.append(rho[c.n] - lhs)
    rhs = rho[0] + increments
    return VerificationReport(
        "rho_decomposition", lhs, rhs, lhs - rhs, kind="identity", detail={"term_errors": term_errors, "delta": delta}
    )


def verify_unallocated_half(x) -> VerificationReport:
    """For symmetric f the unallocated part costs at most half the fractional objective."""
    c = _ctx(x)
    lhs = 0.5 * objective(c.x)
    rhs = unallocated_integral(c, 1.0)
    return VerificationReport("unallocated_half", lhs, rhs, lhs - rhs)


def verify_level_sets(x, thetas) -> VerificationReport:
    """Interval form of A(theta) / U(theta) from the alpha profile matches direct thresholding."""
    c = _ctx(x)
    p = c.profile
    mismatches = 0
    for t in thetas:
        ts = theta_sets(c.x, t)
        j = int(np.searchsorted(p.alphas, t, side="left")) + 1  # t in (alpha_{j-1}, alpha_j]
        U = c.prefix[j - 1]
        if ts.unallocated != U or ts.allocated != c.full & ~U:
            mismatches += 1
    return VerificationReport("level_sets", 0.0, float(mismatches), -float(mismatches), kind="identity")


def expected_cost_sym(x: FractionalAllocation, attach="last") -> float:
    """Exact expectation over theta ~ U[0, 1] of the uncrossing rounding's cost."""
    total = 0.0
    prev = 0.0
    for t in breakpoints(x, 0.0, 1.0):
        cost, _ = symmetric_outcome(x, t, attach)
        total += (t - prev) * cost
        prev = t
    return total


def expected_cost_half(x: FractionalAllocation, attach="last") -> float:
    """Exact expectation over theta ~ U(1/2, 1] of the half-rounding cost."""
    total = 0.0
    prev = 0.5
    for t in breakpoints(x, 0.5, 1.0):
        cost, _ = half_outcome(x, t, attach)
        total += (t - prev) * cost
        prev = t
    return 2.0 * total


DEFAULT_DELTAS = (0.5, 0.6, 0.75, 0.9, 1.0)


def verify_all(x: FractionalAllocation, deltas=DEFAULT_DELTAS) -> list[VerificationReport]:
    """Every certificate for one allocation.  Used by the CLI and the sweeps."""
    c = _Context(x)
    reports = [verify_delta_identity(c)]
    for d in deltas:
        reports.append(verify_main_theorem(c, d))
        reports.append(verify_charging1_sum(c, d))
        reports.append(verify_charging2(c, d))
        reports.append(verify_lambda_identity(c, d))
        reports.append(verify_rho_decomposition(c, d))
    if x.instance.oracle.symmetric and x.k >= 2:
        reports.append(verify_unallocated_half(c))
    return reports
