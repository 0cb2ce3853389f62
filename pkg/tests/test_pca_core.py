"""Tests for the correlation matrix, Jacobi solver, retention and scores."""

import numpy as np
import pytest

from data_ingest import load_daly_csv, load_group_config, standardize, zscore_columns
from errors import ConfigError, DimensionMismatch, NoConvergence, NotSymmetric, ZeroVector
from pca_core import (
    KAISER,
    RetentionRule,
    SymMatrix,
    component_profile,
    component_scores,
    correlation_matrix,
    eigen_decompose,
    explained_variance,
    fit_pca,
    index_labels,
    orient_sign,
    parse_retention,
    retain_components,
    scree_data,
)


def _random_symmetric(rng: np.random.Generator, p: int) -> SymMatrix:
    a = rng.normal(size=(p, p))
    return SymMatrix((a + a.T) / 2.0)


# ============================================================================
# Symmetric matrix and sign orientation
# ============================================================================


class TestSymMatrix:
    def test_rejects_asymmetric(self) -> None:
        with pytest.raises(NotSymmetric):
            SymMatrix(np.array([[1.0, 0.5], [0.4, 1.0]]))

    def test_rejects_non_square(self) -> None:
        with pytest.raises(NotSymmetric):
            SymMatrix(np.ones((2, 3)))

    def test_rejects_nan(self) -> None:
        with pytest.raises(NotSymmetric):
            SymMatrix(np.array([[1.0, np.nan], [np.nan, 1.0]]))


class TestOrientSign:
    def test_flips_negative_max(self) -> None:
        np.testing.assert_array_equal(orient_sign([0.2, -0.9, 0.1]), [-0.2, 0.9, -0.1])

    def test_tie_goes_to_lowest_index(self) -> None:
        np.testing.assert_array_equal(orient_sign([-0.5, 0.5]), [0.5, -0.5])

    def test_zero_vector(self) -> None:
        with pytest.raises(ZeroVector):
            orient_sign([0.0, 0.0])

    def test_idempotent(self) -> None:
        v = orient_sign([0.3, -0.7, 0.2])
        np.testing.assert_array_equal(orient_sign(v), v)


# ============================================================================
# Eigendecomposition
# ============================================================================


class TestEigenDecompose:
    def test_two_by_two_example(self) -> None:
        values, vectors = eigen_decompose(SymMatrix(np.array([[1.0, 0.5], [0.5, 1.0]])))
        np.testing.assert_allclose(values, [1.5, 0.5], atol=1e-10)
        s = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(vectors[:, 0], [s, s], atol=1e-10)
        np.testing.assert_allclose(vectors[:, 1], [s, -s], atol=1e-10)

    def test_identity(self) -> None:
        values, vectors = eigen_decompose(SymMatrix(np.eye(3)))
        np.testing.assert_allclose(values, [1.0, 1.0, 1.0])
        np.testing.assert_allclose(np.abs(vectors), np.eye(3))

    @pytest.mark.parametrize("p", [2, 3, 5, 8, 12])
    def test_reconstruction_and_orthonormality(self, p: int) -> None:
        rng = np.random.default_rng(100 + p)
        for _ in range(5):
            m = _random_symmetric(rng, p)
            values, vectors = eigen_decompose(m)
            np.testing.assert_allclose(vectors @ np.diag(values) @ vectors.T, m.entries, atol=1e-8)
            np.testing.assert_allclose(vectors.T @ vectors, np.eye(p), atol=1e-9)
            assert np.all(np.diff(values) <= 1e-12)

    def test_many_random_matrices(self) -> None:
        rng = np.random.default_rng(2718)
        for _ in range(1000):
            p = int(rng.integers(2, 9))
            m = _random_symmetric(rng, p)
            values, vectors = eigen_decompose(m)
            rebuilt = vectors @ np.diag(values) @ vectors.T
            assert np.linalg.norm(rebuilt - m.entries, ord="fro") <= 1e-9
            np.testing.assert_allclose(np.linalg.norm(vectors, axis=0), 1.0, atol=1e-9)
            gram = vectors.T @ vectors
            assert np.max(np.abs(gram - np.diag(np.diag(gram)))) <= 1e-9

    def test_every_column_is_oriented(self) -> None:
        rng = np.random.default_rng(5)
        _, vectors = eigen_decompose(_random_symmetric(rng, 6))
        for k in range(6):
            col = vectors[:, k]
            assert col[int(np.argmax(np.abs(col)))] > 0

    def test_matches_numpy_eigenvalues(self) -> None:
        rng = np.random.default_rng(9)
        m = _random_symmetric(rng, 7)
        values, _ = eigen_decompose(m)
        np.testing.assert_allclose(values, np.sort(np.linalg.eigvalsh(m.entries))[::-1], atol=1e-9)

    def test_sweep_budget(self) -> None:
        rng = np.random.default_rng(1)
        with pytest.raises(NoConvergence):
            eigen_decompose(_random_symmetric(rng, 6), max_sweeps=0)

    def test_bitwise_deterministic(self) -> None:
        rng = np.random.default_rng(11)
        m = _random_symmetric(rng, 9)
        a_vals, a_vecs = eigen_decompose(m)
        b_vals, b_vecs = eigen_decompose(m)
        assert a_vals.tobytes() == b_vals.tobytes()
        assert a_vecs.tobytes() == b_vecs.tobytes()


# ============================================================================
# Retention rules
# ============================================================================


class TestRetention:
    LAMBDA = [2.0, 1.2, 0.5, 0.3]

    def test_kaiser(self) -> None:
        assert retain_components(self.LAMBDA, KAISER) == 2

    def test_cumvar(self) -> None:
        assert retain_components(self.LAMBDA, "cumvar=0.8") == 2
        assert retain_components(self.LAMBDA, "cumvar=0.9") == 3

    def test_fixed_clamped(self) -> None:
        assert retain_components(self.LAMBDA, "fixed=3") == 3
        assert retain_components(self.LAMBDA, "fixed=9") == 4
        assert retain_components(self.LAMBDA, "fixed=0") == 1

    def test_kaiser_keeps_at_least_one(self) -> None:
        assert retain_components([0.9, 0.6, 0.5], KAISER) == 1

    def test_eigenvalue_exactly_one_is_not_kept(self) -> None:
        assert retain_components([1.5, 1.0, 0.5], KAISER) == 1

    def test_parse(self) -> None:
        assert parse_retention("kaiser") is KAISER
        assert parse_retention("cumvar=0.85") == RetentionRule("cumvar", 0.85)
        assert str(parse_retention("fixed=2")) == "fixed=2"

    @pytest.mark.parametrize("text", ["scree", "cumvar=1.5", "cumvar=", "fixed=two"])
    def test_parse_rejects(self, text: str) -> None:
        with pytest.raises(ConfigError):
            parse_retention(text)

    def test_explained_variance(self) -> None:
        fractions, cumulative = explained_variance(self.LAMBDA, 4)
        np.testing.assert_allclose(fractions, [0.5, 0.3, 0.125, 0.075])
        assert cumulative[-1] == pytest.approx(1.0)


# ============================================================================
# Fitting and scores on the synthetic table
# ============================================================================


@pytest.fixture
def synthetic_table(synthetic_files):
    csv_path, groups_path = synthetic_files
    return load_daly_csv(csv_path, load_group_config(groups_path))


class TestCorrelationMatrix:
    def test_identical_columns(self) -> None:
        x = np.random.default_rng(1).normal(size=30)
        r = correlation_matrix(zscore_columns(np.column_stack([x, x, x ** 2]), ["a", "b", "c"]))
        assert r.entries[0, 1] == pytest.approx(1.0, abs=1e-12)

    def test_negated_column(self) -> None:
        x = np.random.default_rng(2).normal(size=30)
        r = correlation_matrix(zscore_columns(np.column_stack([x, -x]), ["a", "b"]))
        assert r.entries[0, 1] == pytest.approx(-1.0, abs=1e-12)
        assert r.entries[1, 0] == r.entries[0, 1]

    def test_independent_columns_are_near_zero(self) -> None:
        rng = np.random.default_rng(3)
        r = correlation_matrix(zscore_columns(rng.normal(size=(10000, 4)), ["a", "b", "c", "d"]))
        off = r.entries[~np.eye(4, dtype=bool)]
        assert np.all(np.abs(off) <= 0.05)
        np.testing.assert_allclose(np.diag(r.entries), 1.0, atol=1e-12)


class TestFitPca:
    def test_score_variance_on_random_datasets(self) -> None:
        rng = np.random.default_rng(4)
        names = [f"c{j}" for j in range(7)]
        for _ in range(100):
            raw = rng.normal(size=(27, 7)) @ rng.normal(size=(7, 7))
            z = zscore_columns(raw, names, years=range(1990, 2017))
            model = fit_pca(z, "communicable", "fixed=7")
            for k, series in enumerate(component_scores(z, model)):
                scores = np.asarray(series.scores)
                assert scores.var(ddof=1) == pytest.approx(model.eigenvalues[k], abs=1e-6)

    def test_correlation_matrix_properties(self, synthetic_table) -> None:
        r = correlation_matrix(standardize(synthetic_table, "communicable"))
        np.testing.assert_allclose(np.diag(r.entries), 1.0, atol=1e-12)
        assert np.all(np.abs(r.entries) <= 1.0 + 1e-12)
        assert np.array_equal(r.entries, r.entries.T)

    def test_trace_and_fractions(self, synthetic_table) -> None:
        for group in synthetic_table.present_groups():
            model = fit_pca(standardize(synthetic_table, group), group)
            assert model.eigenvalues.sum() == pytest.approx(model.p, abs=1e-6)
            assert model.cumulative_fraction[-1] == pytest.approx(1.0, abs=1e-9)
            assert 1 <= model.retained <= model.p

    def test_score_variance_equals_eigenvalue(self, synthetic_table) -> None:
        z = standardize(synthetic_table, "injury")
        model = fit_pca(z, "injury", "fixed=3")
        for k, series in enumerate(component_scores(z, model)):
            scores = np.asarray(series.scores)
            assert scores.mean() == pytest.approx(0.0, abs=1e-9)
            assert scores.var(ddof=1) == pytest.approx(model.eigenvalues[k], rel=1e-8)

    def test_scores_are_uncorrelated(self, synthetic_table) -> None:
        z = standardize(synthetic_table, "communicable")
        model = fit_pca(z, "communicable", "fixed=2")
        a, b = (np.asarray(s.scores) for s in component_scores(z, model))
        assert float(a @ b) == pytest.approx(0.0, abs=1e-8)

    def test_scores_keep_years(self, synthetic_table) -> None:
        z = standardize(synthetic_table, "noncommunicable")
        model = fit_pca(z, "noncommunicable")
        series = component_scores(z, model)[0]
        assert series.years == synthetic_table.years

    def test_repeat_runs_are_identical(self, synthetic_table) -> None:
        z = standardize(synthetic_table, "communicable")
        first = fit_pca(z, "communicable")
        second = fit_pca(z, "communicable")
        assert first.loadings.tobytes() == second.loadings.tobytes()

    def test_column_order_must_match(self, synthetic_table) -> None:
        z = standardize(synthetic_table, "injury")
        model = fit_pca(z, "injury")
        swapped = zscore_columns(z.z[:, ::-1], list(z.column_names)[::-1])
        with pytest.raises(DimensionMismatch):
            component_scores(swapped, model)

    def test_scree_and_profile(self, synthetic_table) -> None:
        z = standardize(synthetic_table, "communicable")
        model = fit_pca(z, "communicable")
        scree = scree_data(model)
        assert [i for i, _ in scree] == list(range(1, model.p + 1))
        profile = component_profile(model, 1, threshold=0.0)
        assert len(profile) == model.p
        magnitudes = [abs(v) for _, v in profile]
        assert magnitudes == sorted(magnitudes, reverse=True)
        with pytest.raises(DimensionMismatch):
            component_profile(model, model.p + 1)


class TestIndexLabels:
    def test_labels(self) -> None:
        assert index_labels("communicable", 2) == ["CPC1", "CPC2"]
        assert index_labels("noncommunicable", 1) == ["NPC"]
        assert index_labels("noncommunicable", 2) == ["NPC1", "NPC2"]
        assert index_labels("injury", 1) == ["IPC1"]
