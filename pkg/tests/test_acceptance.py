"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every tolerance and runtime cap is pinned here. Statistical criteria fix
their seeds, so the suite is deterministic end to end. Run with
``pytest tests/test_acceptance.py -v -s`` to see the per-criterion lines.
"""

import math
import time

import numpy as np
import pytest

from distnn import (
    DgpSpec,
    DistributionalMatrix,
    SigmaFunction,
    UniformPair,
    asymptotic_band,
    barycenter,
    brute_force_w2_sq,
    find_neighbors,
    from_samples,
    generate,
    impute,
    true_w2,
    uniform_w2_sq,
    w2_equal_n,
    w2_general,
    w2sq,
)
from distnn.experiments import (
    ExperimentSpec,
    run_denoising,
    run_quantity_eval,
    run_scaling,
    verify_uniform_barycenter_error,
    verify_barycenter_rate,
)
from distnn.panel import Panel, read_panel_csv, write_panel_csv
from distnn.synthetic import TrueDistributions, make_base

HETERO_UNIFORM = dict(
    kind="heteroscedastic",
    base_family="uniform",
    location_range=(-5.0, 5.0),
    scale_range=(1.0, 5.0),
)


def report(criterion, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    assert ok, f"criterion {criterion}: {detail}"


class TestCriterion1OracleEquivalence:
    def test_brute_force_and_general_agree(self):
        start = time.time()
        rng = np.random.default_rng(2718)
        worst_bf, worst_ge = 0.0, 0.0
        for _ in range(1000):
            n = int(rng.integers(1, 7))
            a = from_samples(rng.uniform(-5.0, 5.0, size=n))
            b = from_samples(rng.uniform(-5.0, 5.0, size=n))
            fast = w2_equal_n(a, b) ** 2
            exact = brute_force_w2_sq(a, b)
            scale = max(abs(exact), 1e-15)
            worst_bf = max(worst_bf, abs(fast - exact) / scale)
            general = w2_general(a, b)
            equal = w2_equal_n(a, b)
            scale = max(abs(equal), 1e-15)
            worst_ge = max(worst_ge, abs(general - equal) / scale)
        elapsed = time.time() - start
        ok = worst_bf <= 1e-12 and worst_ge <= 1e-12 and elapsed < 5.0
        report(
            1, ok,
            f"1000 instances, max rel dev vs brute force {worst_bf:.2e}, "
            f"vs equal-n {worst_ge:.2e}, {elapsed:.2f}s (cap 5s)",
        )


class TestCriterion2ClosedFormUniform:
    def test_exact_values_and_ordering(self):
        value = uniform_w2_sq(UniformPair(0, 1, 2, 3))
        truth = TrueDistributions(
            make_base("uniform"),
            np.array([[0.0], [2.0], [4.0]]),
            np.array([[1.0], [1.0], [1.0]]),
            np.array([1]),
            None,
            DgpSpec(base_family="uniform", n_per_entry=1),
        )
        near = true_w2(truth, (0, 0), (1, 0))
        far = true_w2(truth, (0, 0), (2, 0))
        ok = value == 4.0 and near < far and near == 2.0 and far == 4.0
        report(2, ok, f"uniform W2^2 = {value} (want 4), ordering {near} < {far}")


class TestCriterion3UniformBarycenterMonteCarlo:
    def test_closed_form_matches_simulation(self):
        start = time.time()
        rows = verify_uniform_barycenter_error(
            m_list=(1, 5, 20), n_list=(5, 20, 100), trials=10_000, seed=0
        )
        elapsed = time.time() - start
        worst = max(abs(r.z_score) for r in rows)
        ok = worst < 4.0 and elapsed < 120.0
        report(
            3, ok,
            f"9 cells x 10^4 trials, max |z| = {worst:.2f} (cap 4), "
            f"{elapsed:.1f}s (cap 120s)",
        )


class TestCriterion4BarycenterRateShape:
    def test_multiplicative_regime(self):
        start = time.time()
        res = verify_barycenter_rate(
            k_list=(8, 16, 32),
            n_list=(100, 250, 500, 1000, 2000),
            trials_k=3000,
            trials_n=600,
            n_fixed=500,
            k_fixed=32,
            seed=0,
        )
        elapsed = time.time() - start
        ratio_ok = all(abs(r - 0.5) <= 0.15 * 0.5 for r in res.doubling_ratios)
        slope = res.slope_fit.exponent
        slope_ok = -2.2 <= slope <= -0.9
        ok = ratio_ok and slope_ok and elapsed < 300.0
        report(
            4, ok,
            f"doubling ratios {[round(float(r), 3) for r in res.doubling_ratios]} "
            f"(want 0.5 +/- 15%), slope {slope:.3f} in [-2.2, -0.9], "
            f"{elapsed:.1f}s (cap 300s)",
        )


class TestCriterion5ScalingReproduction:
    def test_sample_count_exponent(self):
        start = time.time()
        spec = ExperimentSpec(
            dgp=DgpSpec(n_per_entry=100, seed=0, **HETERO_UNIFORM),
            sweep="n_samples",
            values=(50, 100, 250, 500, 1000),
            trials=50,
            n_rows=200,
            n_cols=30,
            eta_policy="tuned",
            tune_budget=50,
            min_neighbors=2,
            baseline_resamples=100,
            seed=0,
        )
        result = run_scaling(spec)
        elapsed = time.time() - start
        exponent = result.fit.exponent
        ok = -2.2 <= exponent <= -0.7 and elapsed < 600.0
        report(
            "5a", ok,
            f"mean W2^2 vs n exponent {exponent:.3f} in [-2.2, -0.7], "
            f"{elapsed:.1f}s",
        )

    def test_effective_sample_size_exponent(self):
        start = time.time()
        spec = ExperimentSpec(
            dgp=DgpSpec(n_per_entry=500, seed=0, **HETERO_UNIFORM),
            sweep="n_times_neighbors",
            values=(1000, 2000, 4000, 8000, 16000),
            trials=50,
            n_rows=20,
            n_cols=10,
            rows_per_neighbor=10,
            baseline_resamples=100,
            seed=0,
        )
        result = run_scaling(spec)
        elapsed = time.time() - start
        exponent = result.fit.exponent
        ok = -1.3 <= exponent <= -0.5 and elapsed < 600.0
        report(
            "5b", ok,
            f"mean W2^2 vs n*|N| exponent {exponent:.3f} in [-1.3, -0.5], "
            f"{elapsed:.1f}s",
        )

    def test_denoising_at_twenty_rows(self):
        start = time.time()
        spec = ExperimentSpec(
            dgp=DgpSpec(n_per_entry=4, seed=0, **HETERO_UNIFORM),
            sweep="n_rows",
            values=(20,),
            trials=50,
            n_rows=20,
            n_cols=30,
            eta_policy="tuned",
            min_neighbors=1,
            baseline_resamples=100,
            seed=0,
        )
        res = run_denoising(spec)
        elapsed = time.time() - start
        ok = res.estimator_mean_error < res.baseline_mean_error and elapsed < 600.0
        report(
            "5c", ok,
            f"estimator {res.estimator_mean_error:.4f} < single-entry baseline "
            f"{res.baseline_mean_error:.4f} at 20 rows, {elapsed:.1f}s",
        )


class TestCriterion6QuantityDenoising:
    def test_median_relative_errors(self):
        start = time.time()
        spec = ExperimentSpec(
            dgp=DgpSpec(n_per_entry=500, seed=0, **HETERO_UNIFORM),
            sweep="n_rows",
            values=(200,),
            trials=50,
            n_rows=200,
            n_cols=30,
            eta_policy="tuned",
            min_neighbors=2,
            baseline_resamples=1,
            seed=0,
        )
        q = run_quantity_eval(spec)
        elapsed = time.time() - start
        details, ok = [], True
        for key in ("mean", "median", "std", "var_at_risk"):
            est = float(np.median(q.estimator_rel_errors[key]))
            base = float(np.median(q.baseline_rel_errors[key]))
            ok &= est <= base
            details.append(f"{key} {est:.4f}<={base:.4f}")
        ok &= elapsed < 300.0
        report(6, ok, ", ".join(details) + f", {elapsed:.1f}s (cap 300s)")


class TestCriterion7ConfidenceBands:
    def test_algebraic_band_behaviour(self):
        # four identical neighbor rows allow doubling |N| without moving the
        # estimate, so the half-width laws can be checked exactly
        entry = [0.0, 1.0]
        m = DistributionalMatrix(
            [[entry, None]] + [[entry, [2.0, 3.0]] for _ in range(4)]
        )
        sigma = SigmaFunction(
            mode="oracle",
            density_at_quantile_fns=(lambda t: np.ones_like(np.atleast_1d(t)),),
        )
        levels = [0.25, 0.5, 0.75]
        r2 = impute(m, 0, 1, eta=1e9, max_neighbors=2)
        r4 = impute(m, 0, 1, eta=1e9, max_neighbors=4)
        h_n = asymptotic_band(r2, sigma, 100, 0.05, levels).half_widths()
        h_2n = asymptotic_band(r2, sigma, 200, 0.05, levels).half_widths()
        h_k4 = asymptotic_band(r4, sigma, 100, 0.05, levels).half_widths()
        scale_ok = np.allclose(h_n / h_2n, math.sqrt(2.0), rtol=1e-12) and np.allclose(
            h_n / h_k4, math.sqrt(2.0), rtol=1e-12
        )
        collapsed = asymptotic_band(
            r2, sigma, 100, 1.0 - 1e-12, levels, simultaneous=False
        ).half_widths()
        collapse_ok = bool(np.all(collapsed < 1e-9))
        ok = scale_ok and collapse_ok
        report(
            "7a", ok,
            f"half-width ratios at 2x n_j and 2x |N| both sqrt(2) exactly "
            f"({scale_ok}), alpha->1 collapse max width {collapsed.max():.1e}",
        )

    def test_oracle_coverage(self):
        start = time.time()
        trials, hits = 500, 0
        root = np.random.SeedSequence(777)
        for child in root.spawn(trials):
            rng = np.random.default_rng(child)
            spec = DgpSpec(
                kind="heteroscedastic",
                base_family="uniform",
                location_range=(-0.001, 0.001),
                scale_range=(1.0, 5.0),
                n_per_entry=2000,
                seed=int(rng.integers(2**63)),
            )
            full, truth = generate(spec, 12, 4)
            masked = full.mask_cell(0, 0)
            result = impute(masked, 0, 0, eta=np.inf, max_neighbors=4)
            sigma = SigmaFunction.from_true_distributions(
                truth, result.neighbors.rows, 0
            )
            band = asymptotic_band(
                result, sigma, n_j=2000, alpha=0.05, levels=[0.5],
                simultaneous=False,
            )
            true_median = truth.quantile(0, 0, 0.5)
            hits += int(band.lower[0] <= true_median <= band.upper[0])
        elapsed = time.time() - start
        coverage = hits / trials
        ok = 0.90 <= coverage <= 0.99 and elapsed < 600.0
        report(
            "7b", ok,
            f"oracle 95% band pointwise coverage at t=0.5: {coverage:.3f} "
            f"in [0.90, 0.99] over {trials} trials, {elapsed:.1f}s",
        )


class TestCriterion8PropertySuites:
    def test_metric_axioms_ten_thousand_triples(self):
        rng = np.random.default_rng(161803)
        checked = 0
        for _ in range(10_000):
            n_a, n_b, n_c = rng.integers(1, 8, size=3)
            a = from_samples(rng.normal(size=n_a))
            b = from_samples(rng.normal(size=n_b))
            c = from_samples(rng.normal(size=n_c))
            dab, dba = w2_general(a, b), w2_general(b, a)
            assert dab >= 0.0 and dab == dba
            assert w2_general(a, a) == 0.0
            assert dab <= w2_general(a, c) + w2_general(c, b) + 1e-12
            checked += 1
        report("8 (metric axioms)", checked == 10_000, f"{checked} random triples")

    def test_barycenter_local_argmin(self):
        rng = np.random.default_rng(271828)
        for _ in range(200):
            k = int(rng.integers(1, 5))
            n = int(rng.integers(1, 6))
            ds = [from_samples(rng.integers(-3, 4, size=n)) for _ in range(k)]
            center = barycenter(ds)
            best = sum(w2sq(center, d) for d in ds)
            for atom in range(n):
                for delta in (-1.0, 1.0):
                    cand = center.samples.copy()
                    cand[atom] += delta
                    assert best <= sum(w2sq(from_samples(cand), d) for d in ds) + 1e-12
        report("8 (barycenter argmin)", True, "200 perturbation sweeps")

    def test_eta_monotone_nesting(self):
        rng = np.random.default_rng(577215)
        for _ in range(50):
            entries = [
                [rng.normal(size=3) if rng.random() < 0.85 else None for _ in range(5)]
                for _ in range(6)
            ]
            entries[0][0] = rng.normal(size=3)
            m = DistributionalMatrix(entries)
            previous = set()
            for eta in np.sort(rng.uniform(0, 8, size=5)):
                members = set(find_neighbors(m, 0, 0, float(eta)).rows.tolist())
                assert previous <= members
                previous = members
        report("8 (eta nesting)", True, "50 random masked matrices")

    def test_column_exclusion_invariance(self):
        rng = np.random.default_rng(141421)
        for _ in range(50):
            rows = [[rng.normal(size=3) for _ in range(4)] for _ in range(5)]
            m = DistributionalMatrix(rows)
            ns = find_neighbors(m, 0, 2, eta=np.inf)
            perturbed = [
                [cell + (100.0 if c == 2 else 0.0) * rng.normal(size=3)
                 for c, cell in enumerate(row)]
                for row in rows
            ]
            ns2 = find_neighbors(DistributionalMatrix(perturbed), 0, 2, eta=np.inf)
            assert np.array_equal(ns.distances, ns2.distances)
        report("8 (column exclusion)", True, "50 perturbed matrices")

    def test_translation_equivariance(self):
        rng = np.random.default_rng(236067)
        for _ in range(50):
            rows = [
                [rng.integers(-5, 6, size=4).astype(float) for _ in range(3)]
                for _ in range(3)
            ]
            m = DistributionalMatrix(rows).mask_cell(0, 1)
            base = impute(m, 0, 1, eta=np.inf).estimate
            c = float(rng.integers(-9, 10))
            shifted = [
                [cell + (c if idx == 1 else 0.0) for idx, cell in enumerate(row)]
                for row in rows
            ]
            m2 = DistributionalMatrix(shifted).mask_cell(0, 1)
            est = impute(m2, 0, 1, eta=np.inf).estimate
            assert np.array_equal(est.samples, base.samples + c)
        report("8 (translation equivariance)", True, "50 shifted matrices")

    def test_csv_round_trip_identity(self, tmp_path):
        rng = np.random.default_rng(301029)
        entries = [
            [rng.normal(size=int(rng.integers(1, 6))) if rng.random() < 0.8 else None
             for _ in range(6)]
            for _ in range(5)
        ]
        entries[0][0] = rng.normal(size=3)
        panel = Panel(
            matrix=DistributionalMatrix(entries),
            row_keys=tuple(f"r{i}" for i in range(5)),
            col_keys=tuple(f"c{j}" for j in range(6)),
        )
        path = tmp_path / "roundtrip.csv"
        write_panel_csv(panel, path)
        back = read_panel_csv(path)
        ok = back.row_keys == panel.row_keys and back.col_keys == panel.col_keys
        ok &= bool(np.array_equal(back.matrix.mask, panel.matrix.mask))
        for i, j in panel.matrix.observed_cells():
            ok &= bool(
                np.array_equal(
                    back.matrix.entry(i, j).samples, panel.matrix.entry(i, j).samples
                )
            )
        report("8 (csv round trip)", ok, "axes, mask, and samples identical")
