"""Tests for the element engine, its verification suites, and the kernels."""

import pytest

from cluster_a11 import (
    ClusterEngine,
    DomainError,
    ElementId,
    FaultSpec,
    ONE,
    ScaleError,
    X1,
    X2,
    ZERO,
    laurent_family,
    make,
)
from cluster_a11.engine import CHECK_NAMES
from cluster_a11 import lattice

X3 = make([(-1, 0, 1), (-1, 2, 1)])
X4 = make([(-2, -1, 1), (-2, 1, 2), (-2, 3, 1), (0, -1, 1)])
S1 = make([(-1, -1, 1), (-1, 1, 1), (1, -1, 1)])
S2 = make([(-2, -2, 1), (-2, 0, 2), (-2, 2, 1), (0, -2, 2), (0, 0, 1), (2, -2, 1)])


@pytest.fixture
def engine():
    return ClusterEngine()


class TestClusterVariables:
    def test_generators(self, engine):
        assert engine.x(1) == X1
        assert engine.x(2) == X2

    def test_first_nontrivial(self, engine):
        assert engine.x(3) == X3
        assert engine.x(4) == X4

    def test_negative_indices_by_swap(self, engine):
        assert engine.x(0) == X3.swap_vars()
        assert engine.x(-1) == X4.swap_vars()

    def test_memoized(self, engine):
        assert engine.x(5) is engine.x(5)

    def test_scale_guard(self):
        small = ClusterEngine(max_index=10)
        with pytest.raises(ScaleError):
            small.x(11)
        with pytest.raises(ScaleError):
            small.x(-11)

    def test_env_lowers_cap(self, monkeypatch):
        monkeypatch.setenv("CLUSTER_A11_MAX_INDEX", "7")
        with pytest.raises(ScaleError):
            ClusterEngine().x(8)

    def test_env_cannot_raise_cap(self, monkeypatch):
        monkeypatch.setenv("CLUSTER_A11_MAX_INDEX", str(10**9))
        assert ClusterEngine().max_index == 10**6


class TestSemicanonical:
    def test_conventional_values(self, engine):
        assert engine.s(-1) == ZERO
        assert engine.s(0) == ONE

    def test_first_generators(self, engine):
        assert engine.s(1) == S1
        assert engine.s(2) == S2

    def test_below_domain(self, engine):
        with pytest.raises(DomainError):
            engine.s(-2)

    def test_s_equals_family(self, engine):
        for n in range(8):
            assert engine.s(n) == laurent_family(2 * n)
            assert engine.x(n + 3) == laurent_family(2 * n + 1)


class TestClosedForms:
    def test_x_closed_base(self, engine):
        assert engine.x_closed(0) == X3
        assert engine.x_closed(1) == X4

    def test_x_closed_specialization(self, engine):
        assert engine.x_closed(2).eval_int(1, 1) == 13

    def test_s_closed_base(self, engine):
        assert engine.s_closed(0) == ONE
        assert engine.s_closed(1) == S1
        assert engine.s_closed(2) == S2

    def test_term_counts(self, engine):
        for n in range(12):
            assert engine.s_closed(n).term_count() == (n + 1) * (n + 2) // 2
            assert engine.x_closed(n).term_count() == (n + 1) * (n + 2) // 2 + 1

    def test_negative_rejected(self, engine):
        with pytest.raises(DomainError):
            engine.x_closed(-1)
        with pytest.raises(DomainError):
            engine.s_closed(-1)


class TestClusterMonomial:
    def test_product_of_generators(self, engine):
        assert engine.cluster_monomial(1, 1, 1) == X1 * X2

    def test_empty_monomial(self, engine):
        assert engine.cluster_monomial(1, 0, 0) == ONE

    def test_adjacent_product(self, engine):
        assert engine.cluster_monomial(2, 1, 1) == make([(-1, 1, 1), (-1, 3, 1)])

    def test_negative_exponents_rejected(self, engine):
        with pytest.raises(DomainError):
            engine.cluster_monomial(1, -1, 0)


class TestKernels:
    def test_packed_and_pure_streams_agree(self):
        packed = list(lattice.stream(20, kernel="packed"))
        pure = list(lattice.stream(20, kernel="pure"))
        assert packed == pure

    def test_engine_kernels_agree(self):
        assert ClusterEngine(kernel="pure").x(12) == ClusterEngine(kernel="packed").x(12)
        assert ClusterEngine(kernel="pure").s(12) == ClusterEngine(kernel="packed").s(12)

    def test_env_selects_kernel(self, monkeypatch):
        monkeypatch.setenv("CLUSTER_A11_KERNEL", "pure")
        assert lattice.kernel_name() == "pure"
        monkeypatch.delenv("CLUSTER_A11_KERNEL")
        assert lattice.kernel_name() == "packed"

    def test_value_at_one_matches_evaluation(self, engine):
        for m in range(-5, 11):
            assert lattice.value_at_one("x", m) == engine.x(m).eval_int(1, 1)
        for n in range(-1, 11):
            assert lattice.value_at_one("s", n) == engine.s(n).eval_int(1, 1)

    def test_exchange_relation_helper(self, engine):
        assert lattice.exchange_relation_holds(3, engine.x(4), engine.x(5), engine.x(6))
        e1, e2, _ = engine.x(6).terms()[0]
        corrupted = engine.x(6) + make([(e1, e2, 1)])
        assert not lattice.exchange_relation_holds(3, engine.x(4), engine.x(5), corrupted)


class TestVerify:
    def test_small_run_all_pass(self, engine):
        report = engine.verify_identities(5)
        assert report.all_passed
        assert {c.name for c in report.checks} == set(CHECK_NAMES)

    def test_zero_run(self, engine):
        assert engine.verify_identities(0).all_passed

    def test_unknown_check_rejected(self, engine):
        with pytest.raises(ValueError):
            engine.verify_identities(3, checks={"bogus"})

    def test_subset_runs_only_requested(self, engine):
        report = engine.verify_identities(4, checks={"exchange_relation"})
        assert {c.name for c in report.checks} == {"exchange_relation"}
        assert report.all_passed

    def test_parallel_matches_sequential(self):
        seq = ClusterEngine().verify_identities(70, jobs=1)
        par = ClusterEngine().verify_identities(70, jobs=2)
        assert seq.all_passed and par.all_passed
        assert [(c.name, c.parameter) for c in seq.checks] == [
            (c.name, c.parameter) for c in par.checks
        ]

    def test_summary_lines_mention_failures(self):
        report = ClusterEngine(fault="s:1").verify_identities(3)
        assert not report.all_passed
        assert any("FAIL" in line for line in report.summary_lines())

    def test_report_failures_list(self, engine):
        assert engine.verify_identities(2).failures() == []


class TestPositivity:
    def test_small_scan(self, engine):
        report = engine.positivity_scan(6)
        assert report.all_passed

    def test_scan_covers_negative_side(self, engine):
        report = engine.positivity_scan(3)
        params = {c.parameter for c in report.checks if c.name == "positive_coeffs_x"}
        assert {-3, -2, -1, 0, 1, 2, 3, 4, 5, 6} == params


class TestFaultInjection:
    @pytest.mark.parametrize("fault", ["s:1", "s:3:2", "x:4", "x:5:1", "x:3:0"])
    def test_single_coefficient_corruption_detected(self, fault):
        report = ClusterEngine(fault=fault).verify_identities(4)
        assert not report.all_passed

    def test_fault_spec_parse(self):
        assert FaultSpec.parse("x:5:2") == FaultSpec("x", 5, 2)
        assert FaultSpec.parse("s:1") == FaultSpec("s", 1, 0)
        with pytest.raises(ValueError):
            FaultSpec.parse("y:1")
        with pytest.raises(ValueError):
            FaultSpec.parse("x")

    def test_fault_from_environment(self, monkeypatch):
        monkeypatch.setenv("CLUSTER_A11_FAULT", "s:2")
        assert not ClusterEngine().verify_identities(4).all_passed

    def test_positivity_sees_term_count_fault(self):
        # +1 on an existing coefficient keeps positivity but the corrupted
        # value no longer matches its closed form
        report = ClusterEngine(fault="s:2:1").verify_identities(3, checks={"closed_form_s"})
        assert not report.all_passed


class TestElementId:
    def test_str(self):
        assert str(ElementId("x", -4)) == "x(-4)"

    def test_kind_validated(self):
        with pytest.raises(DomainError):
            ElementId("q", 1)

    def test_engine_dispatch(self, engine):
        assert engine.element(ElementId("x", 3)) == X3
        assert engine.element(ElementId("s", 1)) == S1
        assert engine.element(ElementId("f", 2)) == S1
