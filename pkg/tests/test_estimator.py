"""Sampling estimator, entropy-gap function, and the uncertainty solver."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from syncrate import (
    BINARY,
    Alphabet,
    EstimatorConfig,
    InsufficientDataError,
    InvalidInputError,
    InvalidParameterError,
    SymbolStream,
    bound_curve,
    build_count_table,
    entropy,
    estimate_entropy_rate,
    find_sync_string,
    gen_binary_entropy,
    simulate,
    solve_uncertainty,
    two_state_nonsynchronizable,
    two_state_synchronizable,
)
from syncrate.estimator import ClusterTable, estimate, sample_extensions


class TestGenBinaryEntropy:
    def test_frozen_values(self):
        assert gen_binary_entropy(0.0, 2) == 0.0
        assert gen_binary_entropy(1.0, 2) == 0.0
        assert gen_binary_entropy(1.0, 5) == 2.0
        assert gen_binary_entropy(0.5, 2) == pytest.approx(1.0, abs=1e-12)
        assert gen_binary_entropy(0.25, 2) == pytest.approx(
            0.8112781244591328, abs=1e-12
        )

    def test_binary_case_symmetric(self):
        for eps in np.linspace(0.0, 1.0, 41):
            assert gen_binary_entropy(float(eps), 2) == pytest.approx(
                gen_binary_entropy(float(1.0 - eps), 2), abs=1e-12
            )

    def test_peak_is_corner_to_uniform(self):
        # the widest possible gap is a zero-entropy corner against the
        # uniform distribution, which sit (k-1)/k apart
        for k in (2, 3, 27):
            assert gen_binary_entropy((k - 1) / k, k) == pytest.approx(
                math.log2(k), abs=1e-12
            )
            for eps in np.linspace(0.01, 0.99, 25):
                assert gen_binary_entropy(float(eps), k) <= math.log2(k) + 1e-12

    def test_grows_with_alphabet(self):
        vals = [gen_binary_entropy(0.3, k) for k in (2, 3, 5, 27)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_parameter_validation(self):
        with pytest.raises(InvalidParameterError):
            gen_binary_entropy(-0.01, 2)
        with pytest.raises(InvalidParameterError):
            gen_binary_entropy(1.01, 2)
        with pytest.raises(InvalidParameterError):
            gen_binary_entropy(0.3, 1)

    def test_bounds_entropy_deviation_random_pairs(self):
        # the gap function must dominate |H(p) - H(q)| whenever the two
        # distributions sit within eps of each other coordinate-wise
        rng = np.random.default_rng(11)
        for k in (2, 3, 5):
            p = rng.dirichlet(np.ones(k), size=10_000)
            q = rng.dirichlet(np.ones(k), size=10_000)
            dist = np.abs(p - q).max(axis=1)
            for pi, qi, di in zip(p, q, dist):
                gap = abs(entropy(pi) - entropy(qi))
                assert gap <= gen_binary_entropy(float(di), k) + 1e-9

    def test_bound_is_tight_at_corner(self):
        # moving eps of mass off a point distribution achieves the bound
        for eps in (0.1, 0.25, 0.5):
            p = np.array([1.0, 0.0])
            q = np.array([1.0 - eps, eps])
            assert abs(entropy(p) - entropy(q)) == pytest.approx(
                gen_binary_entropy(eps, 2), abs=1e-12
            )


class TestEstimatorConfig:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            EstimatorConfig(epsilon=0.0)
        with pytest.raises(InvalidParameterError):
            EstimatorConfig(epsilon=1.0)
        with pytest.raises(InvalidParameterError):
            EstimatorConfig(epsilon=0.1, alpha=1.0)
        with pytest.raises(InvalidParameterError):
            EstimatorConfig(epsilon=0.1, sample_size=0)
        with pytest.raises(InvalidParameterError):
            EstimatorConfig(epsilon=0.1, max_extension_length=-1)
        with pytest.raises(InvalidParameterError):
            EstimatorConfig(epsilon=0.1, min_count=-1)

    def test_resolved_defaults(self):
        cfg = EstimatorConfig(epsilon=0.1)
        assert cfg.resolved_sample_size(2) == 10_000_000
        assert cfg.resolved_sample_size(27) == round(1e7 * math.log2(27) ** 2)
        assert cfg.resolved_extension_length(2) == 8
        assert cfg.resolved_extension_length(4) == 4
        assert cfg.resolved_extension_length(27) == 3

    def test_explicit_values_win(self):
        cfg = EstimatorConfig(epsilon=0.1, sample_size=44, max_extension_length=2)
        assert cfg.resolved_sample_size(27) == 44
        assert cfg.resolved_extension_length(27) == 2

    def test_frozen(self):
        cfg = EstimatorConfig(epsilon=0.1)
        with pytest.raises(dataclasses.FrozenInstanceError):
            cfg.epsilon = 0.2


class TestSampleExtensions:
    def test_trivial_sample(self):
        cfg = EstimatorConfig(epsilon=0.1, sample_size=1, max_extension_length=0)
        assert sample_extensions(cfg, BINARY) == [()]

    def test_deterministic_per_seed(self):
        cfg = EstimatorConfig(
            epsilon=0.1, sample_size=50, max_extension_length=3, seed=5
        )
        first = sample_extensions(cfg, BINARY)
        second = sample_extensions(cfg, BINARY)
        assert first == second
        other = dataclasses.replace(cfg, seed=6)
        assert sample_extensions(other, BINARY) != first

    def test_lengths_near_uniform(self):
        cfg = EstimatorConfig(
            epsilon=0.1, sample_size=100_000, max_extension_length=4, seed=0
        )
        words = sample_extensions(cfg, BINARY)
        assert len(words) == 100_000
        per_len = np.bincount([len(w) for w in words], minlength=5)
        # binomial(1e5, 1/5) has sigma ~ 126; allow five
        assert np.abs(per_len - 20_000).max() < 650

    def test_symbols_near_uniform(self):
        abc = Alphabet(("x", "y", "z"))
        cfg = EstimatorConfig(
            epsilon=0.1, sample_size=30_000, max_extension_length=4, seed=1
        )
        flat = [s for w in sample_extensions(cfg, abc) for s in w]
        freqs = np.bincount(flat, minlength=3) / len(flat)
        assert np.abs(freqs - 1 / 3).max() < 0.02


class TestClusterTable:
    def test_first_fit_absorbs_within_tolerance(self):
        t = ClusterTable(0.1)
        t.add(np.array([0.5, 0.5]))
        t.add(np.array([0.59, 0.41]))
        t.add(np.array([0.65, 0.35]), multiplicity=3)
        assert len(t.representatives) == 2
        assert t.counts == [2, 3]
        assert t.total == 5

    def test_entropy_evaluated_at_founders(self):
        t = ClusterTable(0.2)
        t.add(np.array([1.0, 0.0]), multiplicity=1)
        t.add(np.array([0.9, 0.1]), multiplicity=9)
        # second point joins the first cluster, so its entropy never enters
        assert t.mean_entropy() == 0.0

    def test_zero_tolerance_groups_exact_matches_only(self):
        t = ClusterTable(0.0)
        t.add(np.array([0.5, 0.5]))
        t.add(np.array([0.5, 0.5]))
        t.add(np.array([0.5 + 1e-12, 0.5 - 1e-12]))
        assert len(t.representatives) == 2
        assert t.counts == [2, 1]


class TestSolveUncertainty:
    def test_frozen_anchor_27_symbols(self):
        eps, bound, vac = solve_uncertainty(
            5_000_000, 27, 0.95, round(1e7 * math.log2(27) ** 2)
        )
        assert not vac
        assert eps == pytest.approx(0.07494968743143449, abs=1e-8)
        assert bound == pytest.approx(0.888430506585853, abs=1e-7)

    def test_frozen_anchor_binary(self):
        eps, bound, vac = solve_uncertainty(5_000_000, 2, 0.95, 10_000_000)
        assert not vac
        assert eps == pytest.approx(0.025257679160036087, abs=1e-8)
        assert bound == pytest.approx(0.22076931065228933, abs=1e-7)

    @pytest.mark.parametrize(
        "length,k,alpha,samples,p0",
        [
            (5_000_000, 2, 0.95, 10_000_000, None),
            (30_000, 2, 0.95, 100_000, 0.4),
            (2_000_000, 27, 0.9, 50_000_000, None),
        ],
    )
    def test_matches_linear_scan(self, length, k, alpha, samples, p0):
        c0 = (8 / math.e + 8 / math.e**2) * (k - 1)
        c1 = 2 / math.log2(k) ** 2

        def penalty(e):
            t = c0 * (1 + e * e) / (length * e**3)
            t += 2 * math.exp(-c1 * samples * e * e)
            if p0 is not None:
                t += math.exp(-e * p0 * length)
            return t

        scan = next(
            e for e in np.arange(1e-4, 1.0, 1e-4) if penalty(e) <= 1 - alpha
        )
        eps, _bound, vac = solve_uncertainty(length, k, alpha, samples, p0)
        assert not vac
        assert abs(eps - scan) <= 2e-4

    def test_sits_on_the_feasibility_boundary(self):
        length, k, alpha, samples = 5_000_000, 2, 0.95, 10_000_000
        eps, _b, _v = solve_uncertainty(length, k, alpha, samples)
        c0 = (8 / math.e + 8 / math.e**2) * (k - 1)

        def penalty(e):
            return c0 * (1 + e * e) / (length * e**3) + 2 * math.exp(
                -2 * samples * e * e
            )

        assert penalty(eps) <= 0.05
        assert penalty(eps * 0.999) > 0.05

    def test_bound_shrinks_with_stream_length(self):
        bounds = [
            solve_uncertainty(n, 2, 0.95, 10_000_000)[1]
            for n in (10**6, 10**7, 10**8)
        ]
        assert bounds[0] > bounds[1] > bounds[2]

    def test_bound_shrinks_with_sample_count(self):
        small = solve_uncertainty(10**6, 2, 0.95, 2_000)[1]
        large = solve_uncertainty(10**6, 2, 0.95, 2_000_000)[1]
        assert large < small

    def test_bound_grows_with_confidence(self):
        lax = solve_uncertainty(10**6, 2, 0.9, 10**7)[1]
        strict = solve_uncertainty(10**6, 2, 0.99, 10**7)[1]
        assert strict > lax

    def test_bound_grows_with_alphabet(self):
        binary = solve_uncertainty(10**7, 2, 0.95, 10**8)[1]
        wide = solve_uncertainty(10**7, 27, 0.95, 10**8)[1]
        assert wide > binary

    def test_rare_sync_word_costs_accuracy(self):
        base = solve_uncertainty(10**6, 2, 0.95, 10**7)[1]
        common = solve_uncertainty(10**6, 2, 0.95, 10**7, sync_frequency=0.5)[1]
        rare = solve_uncertainty(10**6, 2, 0.95, 10**7, sync_frequency=1e-5)[1]
        assert common == pytest.approx(base, rel=1e-6)
        assert rare > common

    def test_short_stream_goes_vacuous(self):
        eps, bound, vac = solve_uncertainty(100, 2, 0.95, 10)
        assert vac
        assert eps == 1.0
        assert bound == 1.0

    def test_vacuous_bound_is_alphabet_entropy(self):
        _eps, bound, vac = solve_uncertainty(50, 27, 0.95, 10)
        assert vac
        assert bound == pytest.approx(math.log2(27), abs=1e-12)

    def test_parameter_validation(self):
        with pytest.raises(InvalidParameterError):
            solve_uncertainty(0, 2, 0.95, 10)
        with pytest.raises(InvalidParameterError):
            solve_uncertainty(10, 2, 0.95, 0)
        with pytest.raises(InvalidParameterError):
            solve_uncertainty(10, 1, 0.95, 10)
        with pytest.raises(InvalidParameterError):
            solve_uncertainty(10, 2, 1.0, 10)
        with pytest.raises(InvalidParameterError):
            solve_uncertainty(10, 2, 0.95, 10, sync_frequency=0.0)
        with pytest.raises(InvalidParameterError):
            solve_uncertainty(10, 2, 0.95, 10, sync_frequency=1.5)


class TestBoundCurve:
    def test_rows_match_single_solves(self):
        lengths = [10**5, 10**6, 10**7]
        rows = bound_curve(2, 0.95, 10**7, None, lengths)
        assert [r[0] for r in rows] == lengths
        for n, bound in rows:
            assert bound == solve_uncertainty(n, 2, 0.95, 10**7)[1]

    def test_monotone_decreasing(self):
        rows = bound_curve(2, 0.95, 10**7, None, list(np.geomspace(1e5, 1e9, 9)))
        bounds = [b for _n, b in rows]
        assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))

    def test_confidence_orders_curves(self):
        lengths = [10**6, 10**7]
        lax = bound_curve(2, 0.95, 10**7, None, lengths)
        strict = bound_curve(2, 0.99, 10**7, None, lengths)
        assert all(s[1] > l[1] for s, l in zip(strict, lax))

    def test_decay_tracks_cube_root_over_log(self):
        # the bound should fall like log2(n) / n^(1/3) over a wide range
        lengths = np.geomspace(1e6, 1e9, 7)
        rows = bound_curve(2, 0.95, 10**7, None, list(lengths))
        shaped = np.array(
            [b * n ** (1 / 3) / math.log2(n) for n, b in rows]
        )
        spread = (shaped.max() - shaped.min()) / shaped.mean()
        assert spread < 0.15

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            bound_curve(2, 0.95, 10, None, [])
        with pytest.raises(InvalidParameterError):
            bound_curve(2, 0.95, 10, None, [100, 50])
        with pytest.raises(InvalidParameterError):
            bound_curve(2, 0.95, 10, None, [0, 50])


def naive_estimate(stream, sync, cfg, table):
    """Reference path: cluster every sampled extension one at a time."""
    clusters = ClusterTable(cfg.epsilon)
    for word in sample_extensions(cfg, stream.alphabet):
        succ = table.successor_counts(sync.word + word)
        total = int(succ.sum())
        if total <= cfg.min_count:
            continue
        clusters.add(succ / total)
    return clusters


class TestEstimatePipeline:
    def test_deduplicated_path_matches_naive_clustering(self):
        machine = two_state_nonsynchronizable()
        stream = simulate(machine, 20_000, seed=3)
        cfg = EstimatorConfig(
            epsilon=0.05,
            sample_size=500,
            max_extension_length=3,
            min_count=5,
            seed=3,
        )
        table = build_count_table(stream, 8)
        sync = find_sync_string(table, 5, 1500)
        reference = naive_estimate(stream, sync, cfg, table)
        report = estimate(stream, sync, cfg, table)
        assert report.entropy_rate == reference.mean_entropy()
        assert report.samples_used == reference.total
        assert report.cluster_count == len(reference.representatives)

    def test_report_invariants(self):
        machine = two_state_synchronizable()
        stream = simulate(machine, 30_000, seed=0)
        cfg = EstimatorConfig(
            epsilon=0.05,
            sample_size=50_000,
            max_extension_length=4,
            min_count=200,
            seed=0,
        )
        report = estimate_entropy_rate(
            stream, cfg, collect_min_count=200, search_length=1
        )
        assert 0.0 <= report.entropy_rate <= 1.0
        assert report.samples_used + report.samples_discarded == 50_000
        assert 0.0 < report.sync_frequency <= 1.0
        assert report.cluster_count >= 1
        assert 0.0 < report.epsilon_star <= 1.0
        assert report.stream_length == 30_000
        assert report.alpha == 0.95
        assert report.bound > 0.0

    def test_deterministic(self):
        machine = two_state_synchronizable()
        stream = simulate(machine, 20_000, seed=1)
        cfg = EstimatorConfig(
            epsilon=0.05, sample_size=10_000, max_extension_length=4, seed=0
        )
        a = estimate_entropy_rate(stream, cfg, collect_min_count=300)
        b = estimate_entropy_rate(stream, cfg, collect_min_count=300)
        assert a == b

    def test_constant_stream_rate_zero(self):
        stream = SymbolStream(np.zeros(5_000, dtype=np.int64), BINARY)
        cfg = EstimatorConfig(
            epsilon=0.3, sample_size=100, max_extension_length=2, min_count=5
        )
        report = estimate_entropy_rate(stream, cfg)
        assert report.entropy_rate == 0.0
        assert not report.vacuous

    def test_iid_closed_form(self):
        rng = np.random.default_rng(2)
        stream = SymbolStream(
            (rng.random(100_000) < 0.3).astype(np.int64), BINARY
        )
        cfg = EstimatorConfig(
            epsilon=0.5, sample_size=256, max_extension_length=0, min_count=10
        )
        report = estimate_entropy_rate(stream, cfg)
        expected = entropy(np.array([0.7, 0.3]))
        assert report.entropy_rate == pytest.approx(expected, abs=0.02)

    def test_all_extensions_discarded(self):
        machine = two_state_synchronizable()
        stream = simulate(machine, 2_000, seed=0)
        cfg = EstimatorConfig(
            epsilon=0.1,
            sample_size=50,
            max_extension_length=4,
            min_count=100_000,
        )
        with pytest.raises(InsufficientDataError, match="below 100000"):
            estimate_entropy_rate(stream, cfg, collect_min_count=50)

    def test_count_table_must_cover_extensions(self):
        machine = two_state_synchronizable()
        stream = simulate(machine, 5_000, seed=0)
        table = build_count_table(stream, 3)
        sync = find_sync_string(table, 2, 500)
        cfg = EstimatorConfig(epsilon=0.1, sample_size=10, max_extension_length=6)
        with pytest.raises(InvalidInputError, match="covers words up to"):
            estimate(stream, sync, cfg, table)

    def test_solver_inputs_echoed_from_run(self):
        machine = two_state_synchronizable()
        stream = simulate(machine, 30_000, seed=4)
        cfg = EstimatorConfig(
            epsilon=0.05, sample_size=20_000, max_extension_length=4, min_count=200
        )
        report = estimate_entropy_rate(
            stream, cfg, collect_min_count=200, search_length=1
        )
        eps, bound, vac = solve_uncertainty(
            30_000, 2, 0.95, report.samples_used, report.sync_frequency
        )
        assert report.epsilon_star == eps
        assert report.bound == bound
        assert report.vacuous == vac

    @given(st.integers(min_value=0, max_value=40))
    @settings(max_examples=12, deadline=None)
    def test_rate_stays_in_range_across_seeds(self, seed):
        machine = two_state_nonsynchronizable()
        stream = simulate(machine, 10_000, seed=seed)
        cfg = EstimatorConfig(
            epsilon=0.1, sample_size=2_000, max_extension_length=3, min_count=20
        )
        report = estimate_entropy_rate(stream, cfg, collect_min_count=400)
        assert 0.0 <= report.entropy_rate <= 1.0
