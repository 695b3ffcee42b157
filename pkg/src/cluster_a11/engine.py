"""The algebra's elements and their verification suites.

A :class:`ClusterEngine` computes cluster variables x_m for every integer m,
the semicanonical generators s_n for n >= -1, the Laurent family f_N, the
closed-form constructions, and cluster monomials, memoizing everything it
materializes.  ``verify_identities`` and ``positivity_scan`` re-derive the
algebra's identities on computed values and report per-check outcomes instead
of raising.

Values are immutable and may be shared freely; an engine instance itself is
single-writer (its memo cache mutates), so concurrent use should either give
each thread its own engine or stop writing before sharing one.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterator

from . import fibpoly, lattice
from .errors import (
    DomainError,
    ExactDivisionError,
    InternalError,
    ScaleError,
)
from .laurent import LaurentPoly, ONE, X1, X2, ZERO, make

DEFAULT_MAX_INDEX = 10**6

_ENV_MAX_INDEX = "CLUSTER_A11_MAX_INDEX"
_ENV_FAULT = "CLUSTER_A11_FAULT"

# (x1^2 + x2^2 + 1) / (x1 x2), hand-entered; the startup self-check compares
# the s_1 product formula against it.
_S1_FIXTURE = make([(-1, -1, 1), (-1, 1, 1), (1, -1, 1)])

# Below this point the exchange-relation check multiplies polynomials
# directly; above it the packed lattice comparison is much faster.
_PACKED_EXCHANGE_MIN = 8

# Past this n_max a verify run fans its per-window checks out to worker
# processes (each is an independent pure function of the window values).
_PARALLEL_MIN_NMAX = 64

# Window of the divide-and-reconstruct route cross-checks inside verify.
_DIVISION_SAMPLE_MAX = 12

# Canonical ordering of the identity checks in reports.
CHECK_NAMES = (
    "s_equals_f_even",
    "x_equals_f_odd",
    "x1_exchange",
    "x2_exchange",
    "three_term_x",
    "three_term_x_mirrored",
    "exchange_relation",
    "closed_form_x",
    "closed_form_s",
    "swap_symmetry_s",
    "swap_symmetry_x",
    "division_route",
)

# The subset of checks that depend only on the rolling window of values and
# may therefore run in worker processes.
_WINDOW_CHECKS = frozenset(
    {
        "x1_exchange",
        "x2_exchange",
        "three_term_x",
        "three_term_x_mirrored",
        "exchange_relation",
        "closed_form_x",
        "closed_form_s",
        "swap_symmetry_s",
    }
)


@dataclass(frozen=True)
class ElementId:
    """Tagged identifier: kind 'x' (any m), 's' (n >= -1) or 'f' (N >= 0)."""

    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in ("x", "s", "f"):
            raise DomainError(f"unknown element kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}({self.index})"


@dataclass(frozen=True)
class CheckResult:
    name: str
    parameter: int
    passed: bool


@dataclass
class VerifyReport:
    """Outcome of a verification run; failures are data, not exceptions."""

    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, parameter: int, passed: bool) -> None:
        self.checks.append(CheckResult(name, parameter, bool(passed)))

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def summary_lines(self) -> list[str]:
        """One line per identity name: pass counts and failing parameters."""
        order: list[str] = []
        by_name: dict[str, list[CheckResult]] = {}
        for c in self.checks:
            if c.name not in by_name:
                order.append(c.name)
                by_name[c.name] = []
            by_name[c.name].append(c)
        lines = []
        for name in order:
            group = by_name[name]
            bad = [c.parameter for c in group if not c.passed]
            if bad:
                lines.append(f"{name}: {len(group) - len(bad)}/{len(group)} FAIL at {bad[:8]}")
            else:
                lines.append(f"{name}: {len(group)}/{len(group)} ok")
        return lines


@dataclass(frozen=True)
class FaultSpec:
    """Test hook: corrupt one stored coefficient of one element.

    ``ordinal`` selects the term in canonical order; the coefficient is
    shifted by +1 when the element is materialized.  Parsed from strings like
    ``"s:1"`` or ``"x:5:2"`` (kind:index[:ordinal]).
    """

    kind: str
    index: int
    ordinal: int = 0

    @classmethod
    def parse(cls, text: str) -> "FaultSpec":
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"fault spec {text!r}; expected kind:index[:ordinal]")
        kind = parts[0].strip()
        if kind not in ("x", "s", "f"):
            raise ValueError(f"fault spec kind must be x, s or f, got {kind!r}")
        index = int(parts[1])
        ordinal = int(parts[2]) if len(parts) == 3 else 0
        return cls(kind, index, ordinal)


def _effective_max_index(requested: int | None) -> int:
    cap = DEFAULT_MAX_INDEX
    env = os.environ.get(_ENV_MAX_INDEX)
    if env is not None:
        try:
            cap = min(cap, int(env))
        except ValueError:
            raise ScaleError(f"{_ENV_MAX_INDEX} must be an integer, got {env!r}") from None
    if requested is not None:
        cap = min(cap, requested)  # the environment may lower, never raise
    return cap


def binomial(a: int, b: int) -> int:
    """Binomial coefficient with the out-of-range-is-zero convention."""
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def closed_form_x(n: int) -> LaurentPoly:
    """x_{n+3} built directly from its binomial double sum (n >= 0)."""
    triples = [(-n - 1, n + 2, 1)]
    for q in range(n + 1):
        for r in range(n - q + 1):
            triples.append((2 * q - n - 1, 2 * r - n, binomial(n - r, q) * binomial(n + 1 - q, r)))
    return make(triples)


def closed_form_s(n: int) -> LaurentPoly:
    """s_n built directly from its binomial double sum (n >= 0)."""
    triples = []
    for q in range(n + 1):
        for r in range(n - q + 1):
            triples.append((2 * q - n, 2 * r - n, binomial(n - r, q) * binomial(n - q, r)))
    return make(triples)


def _window_checks(payload) -> list[tuple[str, int, bool]]:
    """One window's worth of identity checks; pure, picklable, order-free."""
    n, names, kernel, s1, s_prev, s_n, x_lo, x_mid, x_hi = payload
    out = []
    if "x1_exchange" in names:
        out.append(("x1_exchange", n, X1 * x_hi == s_n + X2 * x_mid))
    if "x2_exchange" in names:
        out.append(("x2_exchange", n, X2 * s_n == x_mid + X1 * s_prev))
    if "three_term_x" in names:
        out.append(("three_term_x", n, x_hi == s1 * x_mid - x_lo))
    if "three_term_x_mirrored" in names:
        # The same three-term step at m = 1 - n, entirely below zero for
        # n >= 2; negative-index values come from the swap rule.
        out.append(
            ("three_term_x_mirrored", n,
             x_lo.swap_vars() == s1 * x_mid.swap_vars() - x_hi.swap_vars())
        )
    if "exchange_relation" in names:
        if kernel == "packed" and n >= _PACKED_EXCHANGE_MIN:
            ok = lattice.exchange_relation_holds(n, x_lo, x_mid, x_hi)
        else:
            ok = x_lo * x_hi == x_mid * x_mid + ONE
        out.append(("exchange_relation", n, ok))
    if "closed_form_x" in names:
        out.append(("closed_form_x", n, x_hi == closed_form_x(n)))
    if "closed_form_s" in names:
        out.append(("closed_form_s", n, s_n == closed_form_s(n)))
    if "swap_symmetry_s" in names:
        out.append(("swap_symmetry_s", n, s_n.swap_vars() == s_n))
    return out


class ClusterEngine:
    """Session-scoped computer for the algebra; memoizes per instance."""

    def __init__(self, max_index: int | None = None, kernel: str | None = None,
                 fault: FaultSpec | str | None = None):
        self.max_index = _effective_max_index(max_index)
        self.kernel = kernel  # None = follow CLUSTER_A11_KERNEL
        if fault is None:
            env_fault = os.environ.get(_ENV_FAULT)
            fault = FaultSpec.parse(env_fault) if env_fault else None
        elif isinstance(fault, str):
            fault = FaultSpec.parse(fault)
        self.fault = fault
        self._memo: dict[ElementId, LaurentPoly] = {}
        self._self_checked = False

    # -- internal helpers ---------------------------------------------------

    def _check_scale(self, index: int) -> None:
        if abs(index) > self.max_index:
            raise ScaleError(
                f"index {index} beyond the configured bound {self.max_index}"
            )

    def _maybe_corrupt(self, kind: str, index: int, value: LaurentPoly) -> LaurentPoly:
        f = self.fault
        if f is None or f.kind != kind or f.index != index or value.is_zero:
            return value
        terms = value.terms()
        e1, e2, _ = terms[f.ordinal % len(terms)]
        return value + make([(e1, e2, 1)])

    def _startup_self_check(self) -> None:
        # s_1 from its defining product x_0 x_3 - x_1 x_2 must equal the
        # (x1^2 + x2^2 + 1)/(x1 x2) fixture and the kernel's own value.
        if self._self_checked:
            return
        x3 = (ONE + X2 * X2).div_exact(X1)
        s1_product = x3.swap_vars() * x3 - X1 * X2
        if s1_product != _S1_FIXTURE:
            raise InternalError("s_1 product formula disagrees with its fixture")
        if lattice.element("s", 1, self.kernel) != s1_product:
            raise InternalError("kernel seed for s_1 disagrees with the product formula")
        self._self_checked = True

    # -- the element families -------------------------------------------------

    def x(self, m: int) -> LaurentPoly:
        """Cluster variable x_m for any integer m."""
        self._check_scale(m)
        key = ElementId("x", m)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if m == 1:
            value = X1
        elif m == 2:
            value = X2
        elif m >= 3:
            self._startup_self_check()
            value = lattice.element("x", m, self.kernel)
        else:
            value = self.x(3 - m).swap_vars()
        value = self._maybe_corrupt("x", m, value)
        self._memo[key] = value
        return value

    def s(self, n: int) -> LaurentPoly:
        """Semicanonical generator s_n for n >= -1 (s_-1 = 0 by convention)."""
        if n < -1:
            raise DomainError(f"s is defined for n >= -1, got {n}")
        self._check_scale(n)
        key = ElementId("s", n)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        if n == -1:
            value = ZERO
        elif n == 0:
            value = ONE
        else:
            self._startup_self_check()
            value = lattice.element("s", n, self.kernel)
        value = self._maybe_corrupt("s", n, value)
        self._memo[key] = value
        return value

    def f(self, n: int) -> LaurentPoly:
        """Member f_n of the substituted Fibonacci Laurent family, n >= 0."""
        if n < 0:
            raise DomainError(f"f is defined for n >= 0, got {n}")
        self._check_scale(n)
        key = ElementId("f", n)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        value = self._maybe_corrupt("f", n, fibpoly.laurent_family(n))
        self._memo[key] = value
        return value

    def element(self, eid: ElementId) -> LaurentPoly:
        return {"x": self.x, "s": self.s, "f": self.f}[eid.kind](eid.index)

    # -- closed forms and monomials -------------------------------------------

    def x_closed(self, n: int) -> LaurentPoly:
        """x_{n+3} built directly from its binomial double sum."""
        if n < 0:
            raise DomainError("closed form needs n >= 0")
        self._check_scale(n)
        return closed_form_x(n)

    def s_closed(self, n: int) -> LaurentPoly:
        """s_n built directly from its binomial double sum."""
        if n < 0:
            raise DomainError("closed form needs n >= 0")
        self._check_scale(n)
        return closed_form_s(n)

    def cluster_monomial(self, m: int, p: int, q: int) -> LaurentPoly:
        """x_m^p x_{m+1}^q, the semicanonical basis monomials."""
        if p < 0 or q < 0:
            raise DomainError("cluster monomial exponents must be nonnegative")
        return self.x(m) ** p * self.x(m + 1) ** q

    # -- verification suites ----------------------------------------------------

    def _stream(self, n_max: int) -> Iterator[lattice.ChainStep]:
        """Chain stream with the fault hook applied, bypassing the memo."""
        self._startup_self_check()
        for n, s_n, x_n3 in lattice.stream(n_max, self.kernel):
            yield n, self._maybe_corrupt("s", n, s_n), self._maybe_corrupt("x", n + 3, x_n3)

    def verify_identities(self, n_max: int, checks: set[str] | None = None,
                          jobs: int | None = None) -> VerifyReport:
        """Re-derive every identity on the computed elements for n in [0, n_max].

        ``checks`` restricts the run to a subset of the check names; the
        default runs all of them.  Scope of the names:

        * ``s_equals_f_even`` / ``x_equals_f_odd``: the two halves of the
          interleaving of the families by the Laurent family f.
        * ``x1_exchange`` / ``x2_exchange``: the cleared-denominator steps
          x1 x_{n+3} = s_n + x2 x_{n+2} and x2 s_n = x_{n+2} + x1 s_{n-1}.
        * ``three_term_x`` / ``three_term_x_mirrored``: the linearization
          x_{m+1} = s_1 x_m - x_{m-1} on both sides of the index line.
        * ``exchange_relation``: x_{n+1} x_{n+3} = x_{n+2}^2 + 1.
        * ``closed_form_x`` / ``closed_form_s``: the binomial constructions.
        * ``swap_symmetry_x``: x_m against swap of x_{3-m}.
        * ``swap_symmetry_s``: s_n is fixed by the variable swap.
        * ``division_route``: reconstruction of sample elements by exact
          division, forwards and through negative indices.

        ``jobs`` bounds the worker processes used for the per-window checks on
        large runs (default: the available CPUs); the report is ordered by
        check name and index regardless of completion order.
        """
        if n_max < 0:
            raise DomainError("n_max must be nonnegative")
        self._check_scale(n_max + 3)
        wanted = set(CHECK_NAMES) if checks is None else set(checks)
        unknown = wanted - set(CHECK_NAMES)
        if unknown:
            raise ValueError(f"unknown checks: {sorted(unknown)}")
        window_names = frozenset(wanted & _WINDOW_CHECKS)
        workers = self._worker_count(jobs)
        use_pool = bool(window_names) and n_max >= _PARALLEL_MIN_NMAX and workers > 1

        results: list[tuple[str, int, bool]] = []
        pool = submit = None
        if use_pool:
            pool, submit, failbox = self._check_pool(workers, results)
        try:
            self._verify_loop(n_max, wanted, window_names, results, submit)
        except BaseException:
            if pool is not None:
                pool.terminate()
                pool.join()
            raise
        if pool is not None:
            pool.close()
            pool.join()
            if failbox:
                raise InternalError(f"verification worker failed: {failbox[0]}")
        rank = {name: i for i, name in enumerate(CHECK_NAMES)}
        report = VerifyReport()
        for name, n, ok in sorted(results, key=lambda item: (rank[item[0]], item[1])):
            report.add(name, n, ok)
        return report

    def _verify_loop(self, n_max, wanted, window_names, results, submit):
        kernel = self._effective_kernel()
        s1 = self.s(1)
        f_pairs = (
            fibpoly.family_pairs(n_max)
            if ("s_equals_f_even" in wanted or "x_equals_f_odd" in wanted)
            else None
        )
        # Rolling window: holds x_k for k in {n+1, n+2, n+3}; s_prev is s_{n-1}.
        x1_, x2_ = self.x(1), self.x(2)
        window: dict[int, LaurentPoly] = {}
        s_prev = ZERO
        for n, s_n, x_n3 in self._stream(n_max):
            window[n + 3] = x_n3
            x_lo = window.get(n + 1, x1_ if n == 0 else x2_ if n == 1 else None)
            x_mid = window.get(n + 2, x2_ if n == 0 else None)
            if window_names:
                payload = (n, window_names, kernel, s1, s_prev, s_n, x_lo, x_mid, x_n3)
                if submit is not None:
                    submit(payload)
                else:
                    results.extend(_window_checks(payload))
            if f_pairs is not None:
                _, f_even, f_odd = next(f_pairs)
                if "s_equals_f_even" in wanted:
                    results.append(("s_equals_f_even", n, s_n == f_even))
                if "x_equals_f_odd" in wanted:
                    results.append(("x_equals_f_odd", n, x_n3 == f_odd))
            if "swap_symmetry_x" in wanted and n <= _DIVISION_SAMPLE_MAX:
                # Sample-sized: the memoized route reruns its own chain, so
                # the full-window content of the swap rule is carried by the
                # mirrored three-term and division-route checks instead.
                results.append(("swap_symmetry_x", n, self.x(-n) == x_n3.swap_vars()))
            if "division_route" in wanted and n <= _DIVISION_SAMPLE_MAX:
                results.append(("division_route", n, self._division_route_holds(n, x_lo, x_mid, x_n3)))
            window.pop(n + 1, None)
            s_prev = s_n

    @staticmethod
    def _check_pool(workers: int, results: list):
        """Worker pool with a bounded non-blocking submit for window checks.

        Checks are pure functions of their payload, so completion order does
        not matter; the semaphore caps queued payloads (several MB each near
        the top of a long run).
        """
        import multiprocessing
        import threading

        pool = multiprocessing.Pool(workers)
        slots = threading.Semaphore(2 * workers + 2)
        failbox: list[BaseException] = []

        def on_done(batch):
            results.extend(batch)
            slots.release()

        def on_error(exc):
            failbox.append(exc)
            slots.release()

        def submit(payload):
            slots.acquire()
            pool.apply_async(_window_checks, (payload,), callback=on_done, error_callback=on_error)

        return pool, submit, failbox

    @staticmethod
    def _worker_count(jobs: int | None) -> int:
        if jobs is not None:
            return max(1, jobs)
        try:
            available = len(os.sched_getaffinity(0))
        except AttributeError:  # pragma: no cover - non-Linux
            available = os.cpu_count() or 1
        return min(available, 8)

    def _effective_kernel(self) -> str:
        return self.kernel or lattice.kernel_name()

    def _division_route_holds(self, n: int, x_lo, x_mid, x_hi) -> bool:
        # Forward reconstruction by the exchange relation, and the same
        # division run backwards through the negative indices.
        try:
            if (x_mid * x_mid + ONE).div_exact(x_lo) != x_hi:
                return False
            lo_m, mid_m, hi_m = x_hi.swap_vars(), x_mid.swap_vars(), x_lo.swap_vars()
            # At m = 1 - n: x_{m-1} x_{m+1} = x_m^2 + 1 with x_{m-1} = x_{-n}.
            return (mid_m * mid_m + ONE).div_exact(hi_m) == lo_m
        except ExactDivisionError:
            return False

    def positivity_scan(self, n_max: int) -> VerifyReport:
        """Positivity and term-count law over the window [-n_max, n_max + 3].

        Every coefficient of x_m for |m| in window and of s_n for n <= n_max
        must be strictly positive; term counts must equal the lattice-point
        counts (n+1)(n+2)/2 for s_n and one more for x_{n+3}.  Negative-index
        variables share their coefficient multiset with their swap partners,
        which the scan checks explicitly.
        """
        if n_max < 0:
            raise DomainError("n_max must be nonnegative")
        self._check_scale(n_max + 3)
        report = VerifyReport()
        report.add("positive_coeffs_x", 1, all(c > 0 for c in self.x(1).coefficients()))
        report.add("positive_coeffs_x", 2, all(c > 0 for c in self.x(2).coefficients()))
        for n, s_n, x_n3 in self._stream(n_max):
            expected_s = (n + 1) * (n + 2) // 2
            report.add("positive_coeffs_s", n, all(c > 0 for c in s_n.coefficients()))
            report.add("term_count_s", n, s_n.term_count() == expected_s)
            report.add("positive_coeffs_x", n + 3, all(c > 0 for c in x_n3.coefficients()))
            report.add("term_count_x", n + 3, x_n3.term_count() == expected_s + 1)
            mirrored = x_n3.swap_vars()  # x_{-n}
            report.add("positive_coeffs_x", -n, all(c > 0 for c in mirrored.coefficients()))
            report.add("term_count_x", -n, mirrored.term_count() == expected_s + 1)
        return report
