from fractions import Fraction

import numpy as np
import pytest
import scipy.stats

from dyngof.models import ProbVector, Trajectory, pref_attach, sample_trajectory
from dyngof.sampling import (
    CountingFunction,
    EmpiricalMeasure,
    ProbePlan,
    counting_function,
    densify,
    empirical_measure,
    sample_probe_points,
    tv_dense,
    tv_distance,
    tv_via_counting,
)


def traj_from(choice_rows, m=1):
    rows = np.asarray(choice_rows, dtype=np.int64)
    return Trajectory(len(rows) + 1, m, rows.reshape(len(rows), m), "fixture", 0)


def pv(values):
    values = np.asarray(values, dtype=float)
    return ProbVector(t=len(values) + 1, mass=values)


class TestSampleProbePoints:
    def test_tight_horizon_limits_range(self):
        plan = sample_probe_points(12, 3, 10, np.random.default_rng(0))
        assert set(plan.points.tolist()) <= {2, 3}

    def test_sorted_within_range(self):
        plan = sample_probe_points(100, 5, 10, np.random.default_rng(1))
        pts = plan.points.tolist()
        assert pts == sorted(pts)
        assert len(pts) == 5
        assert all(2 <= r <= 91 for r in pts)

    def test_window_exceeding_horizon_rejected(self):
        with pytest.raises(ValueError, match="window exceeds horizon"):
            sample_probe_points(11, 3, 10, np.random.default_rng(0))

    def test_uniform_over_feasible_range(self):
        plan = sample_probe_points(20, 100_000, 10, np.random.default_rng(1234))
        counts = np.bincount(plan.points, minlength=12)[2:12]
        assert counts.sum() == 100_000
        assert scipy.stats.chisquare(counts).pvalue > 0.01


class TestProbePlan:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError, match="sorted"):
            ProbePlan(points=np.array([5, 3]), width=2)

    def test_rejects_points_below_two(self):
        with pytest.raises(ValueError):
            ProbePlan(points=np.array([1, 3]), width=2)

    def test_repeats_allowed(self):
        plan = ProbePlan(points=np.array([3, 3, 3]), width=2)
        assert plan.count == 3

    def test_feasibility(self):
        plan = ProbePlan(points=np.array([2, 9]), width=2)
        assert plan.feasible_for(10)
        assert not plan.feasible_for(9)


class TestEmpiricalMeasure:
    def test_window_starting_at_probe(self):
        # arrivals 2 and 3 fall in [2, 4); both target vertex 1
        emp = empirical_measure(traj_from([[1], [1], [2]]), t=2, width=2)
        assert emp.counts == {1: 2}
        assert emp.denom == 2
        assert emp.masses() == {1: Fraction(1)}

    def test_excludes_targets_at_or_after_probe(self):
        # arrivals 3, 4 in [3, 5); arrival 4 targets vertex 3, outside {1, 2}
        emp = empirical_measure(traj_from([[1], [2], [3]]), t=3, width=2)
        assert emp.counts == {2: 1}
        assert emp.denom == 1

    def test_full_window_without_exclusions(self):
        emp = empirical_measure(traj_from([[1], [1], [1], [1]]), t=2, width=3)
        assert emp.denom == 3 * 1

    def test_multi_edge_counts_individual_choices(self):
        traj = traj_from([[1, 1], [2, 1], [3, 2]], m=2)
        emp = empirical_measure(traj, t=2, width=3)
        # six individual choices in the window; only the three 1s are in-domain
        assert emp.counts == {1: 3}
        assert emp.denom == 3

    def test_window_bounds_checked(self):
        traj = traj_from([[1], [1], [2]])
        with pytest.raises(ValueError):
            empirical_measure(traj, t=1, width=2)
        with pytest.raises(ValueError):
            empirical_measure(traj, t=3, width=3)

    def test_depends_only_on_window_rows(self):
        a = traj_from([[1], [1], [2], [3]])
        b = traj_from([[1], [1], [2], [1]])  # differs only after the window
        ea = empirical_measure(a, t=2, width=2)
        eb = empirical_measure(b, t=2, width=2)
        assert ea == eb

    def test_rational_masses_sum_to_one(self):
        traj = sample_trajectory(pref_attach(m=2), 60, seed=8)
        emp = empirical_measure(traj, t=11, width=20)
        assert sum(emp.masses().values()) == Fraction(1)


class TestTvDistance:
    def test_point_mass_vs_pa_conditional(self):
        emp = EmpiricalMeasure(t=3, width=2, counts={1: 2}, denom=2)
        assert tv_distance(emp, pv([0.75, 0.25])) == pytest.approx(0.25)

    def test_identity(self):
        emp = EmpiricalMeasure(t=3, width=4, counts={1: 3, 2: 1}, denom=4)
        assert tv_distance(emp, pv([0.75, 0.25])) == 0.0

    def test_disjoint_support(self):
        emp = EmpiricalMeasure(t=3, width=2, counts={2: 2}, denom=2)
        assert tv_distance(emp, pv([1.0, 0.0])) == pytest.approx(1.0)

    def test_time_mismatch(self):
        emp = EmpiricalMeasure(t=4, width=2, counts={1: 1}, denom=1)
        with pytest.raises(ValueError, match="time mismatch"):
            tv_distance(emp, pv([0.5, 0.5]))

    def test_empty_window_is_maximal_distance(self):
        emp = EmpiricalMeasure(t=3, width=2, counts={}, denom=0)
        assert tv_distance(emp, pv([0.5, 0.5])) == 1.0

    def test_agrees_with_dense_computation(self):
        rng = np.random.default_rng(77)
        traj = sample_trajectory(pref_attach(), 120, seed=5)
        for _ in range(50):
            t = int(rng.integers(2, 100))
            emp = empirical_measure(traj, t=t, width=20)
            x = rng.random(t - 1)
            q = pv(x / x.sum())
            assert tv_distance(emp, q) == pytest.approx(tv_dense(densify(emp), q), abs=1e-12)

    def test_exact_rational_crosscheck(self):
        emp = EmpiricalMeasure(t=4, width=3, counts={1: 2, 3: 1}, denom=3)
        q = pv([0.5, 0.25, 0.25])
        exact = sum(
            abs(Fraction(emp.counts.get(v, 0), 3) - Fraction(q.mass[v - 1])) for v in (1, 2, 3)
        ) / 2
        assert tv_distance(emp, q) == pytest.approx(float(exact), abs=1e-15)

    def test_bounds_under_fuzz(self):
        rng = np.random.default_rng(3)
        traj = sample_trajectory(pref_attach(), 200, seed=10)
        for _ in range(200):
            t = int(rng.integers(2, 180))
            emp = empirical_measure(traj, t=t, width=int(rng.integers(1, 20)))
            x = rng.random(t - 1) + 1e-12
            assert 0.0 <= tv_distance(emp, pv(x / x.sum())) <= 1.0


class TestTvDense:
    def test_identical(self):
        assert tv_dense(pv([0.5, 0.5]), pv([0.5, 0.5])) == 0.0

    def test_disjoint(self):
        assert tv_dense(pv([1.0, 0.0]), pv([0.0, 1.0])) == 1.0

    def test_hand_value(self):
        assert tv_dense(pv([0.75, 0.25]), pv([0.5, 0.5])) == pytest.approx(0.25)

    def test_symmetric(self):
        rng = np.random.default_rng(9)
        x, y = rng.random(10), rng.random(10)
        p, q = pv(x / x.sum()), pv(y / y.sum())
        assert tv_dense(p, q) == tv_dense(q, p)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            tv_dense(pv([1.0]), pv([0.5, 0.5]))


class TestCountingFunction:
    def test_identical_halves(self):
        cf = counting_function(pv([0.5, 0.5]), pv([0.5, 0.5]))
        assert cf.entries == {(0.5, 0.5): 2}

    def test_per_vertex_pairing(self):
        cf = counting_function(pv([1.0, 0.0]), pv([0.75, 0.25]))
        assert cf.entries == {(1.0, 0.75): 1, (0.0, 0.25): 1}

    def test_entry_counts_sum_to_domain_size(self):
        rng = np.random.default_rng(12)
        x, y = rng.random(37), rng.random(37)
        cf = counting_function(pv(x / x.sum()), pv(y / y.sum()))
        assert sum(cf.entries.values()) == 37

    def test_q_marginal_mass(self):
        rng = np.random.default_rng(13)
        x, y = rng.random(20), rng.random(20)
        cf = counting_function(pv(x / x.sum()), pv(y / y.sum()))
        assert sum(n * q for (_, q), n in cf.entries.items()) == pytest.approx(1.0, abs=1e-12)

    def test_empirical_keys_are_exact_rationals(self):
        emp = EmpiricalMeasure(t=3, width=3, counts={1: 2, 2: 1}, denom=3)
        cf = counting_function(emp, pv([0.75, 0.25]))
        assert (Fraction(2, 3), 0.75) in cf.entries
        assert (Fraction(1, 3), 0.25) in cf.entries

    def test_domain_mismatch(self):
        with pytest.raises(ValueError, match="domain mismatch"):
            counting_function(pv([1.0]), pv([0.5, 0.5]))


class TestTvViaCounting:
    def test_zero_on_identical(self):
        assert tv_via_counting(counting_function(pv([0.5, 0.5]), pv([0.5, 0.5]))) == 0.0

    def test_hand_value(self):
        cf = counting_function(pv([1.0, 0.0]), pv([0.75, 0.25]))
        assert tv_via_counting(cf) == pytest.approx(0.25)

    def test_matches_dense_on_random_pairs(self):
        rng = np.random.default_rng(2024)
        for _ in range(200):
            dim = int(rng.integers(2, 101))
            x, y = rng.random(dim), rng.random(dim)
            p, q = pv(x / x.sum()), pv(y / y.sum())
            assert abs(tv_via_counting(counting_function(p, q)) - tv_dense(p, q)) <= 1e-12

    def test_matches_sparse_on_empirical_measures(self):
        traj = sample_trajectory(pref_attach(), 100, seed=21)
        rng = np.random.default_rng(22)
        for t in (5, 20, 60):
            emp = empirical_measure(traj, t=t, width=15)
            x = rng.random(t - 1)
            q = pv(x / x.sum())
            cf = counting_function(emp, q)
            assert abs(tv_via_counting(cf) - tv_distance(emp, q)) <= 1e-12
