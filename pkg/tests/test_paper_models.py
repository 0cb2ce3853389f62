"""Built-in index models and the published reference tables."""

import numpy as np
import pytest

from errors import UnknownIndex
from expr_parser import parse, to_text
from expr_tree import PowInt, Unary, evaluate, iter_paths
from paper_models import (
    INDEX_IDS,
    PUBLISHED_COMPONENTS,
    PUBLISHED_FORECAST,
    normalize_index_id,
    paper_model,
)
from pca_core import explained_variance, retain_components


class TestPaperModels:
    def test_npc_constant_term(self) -> None:
        assert evaluate(paper_model("NPC"), 0) == pytest.approx(9.32, abs=1e-12)

    def test_cpc1_has_cos_over_t_cubed(self) -> None:
        nodes = [node for _, node in iter_paths(paper_model("CPC1"))]
        assert Unary("cos", parse("t")) in nodes
        assert PowInt(parse("t"), 3) in nodes

    def test_ipc2_matches_printed_form(self) -> None:
        expected = parse("0.78 + 0.006*t^2 + 1.08e-7*t^5 - 0.10*t - 6.59e-6*t^4")
        assert paper_model("IPC2") == expected

    def test_lookup_is_case_insensitive(self) -> None:
        assert normalize_index_id(" npc ") == "NPC"
        assert paper_model("cpc2") == paper_model("CPC2")

    def test_unknown_index(self) -> None:
        with pytest.raises(UnknownIndex):
            paper_model("XPC9")

    def test_all_models_print_and_reparse(self) -> None:
        for e in map(paper_model, INDEX_IDS):
            assert parse(to_text(e)) == e

    def test_forecast_years_evaluate(self) -> None:
        for e in map(paper_model, INDEX_IDS):
            for t in range(1, 32):
                assert np.isfinite(evaluate(e, t))


class TestPublishedTables:
    def test_first_component_loadings_have_unit_norm(self) -> None:
        for published in PUBLISHED_COMPONENTS.values():
            pc1 = np.asarray(published.column(1))
            assert float(pc1 @ pc1) == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize(
        "group, expected",
        [("communicable", [63.4, 18.1]), ("noncommunicable", [96.2]), ("injury", [54.1, 23.7])],
    )
    def test_explained_percentages(self, group, expected) -> None:
        published = PUBLISHED_COMPONENTS[group]
        fractions, cumulative = explained_variance(published.eigenvalues, published.p)
        np.testing.assert_allclose(100.0 * fractions, expected, atol=0.1)
        assert 100.0 * cumulative[-1] == pytest.approx(published.cumulative_percent[-1], abs=0.1)

    def test_kaiser_matches_displayed_columns(self) -> None:
        tails = {"communicable": [0.6, 0.4], "noncommunicable": [0.2, 0.1], "injury": [0.8, 0.3]}
        for group, published in PUBLISHED_COMPONENTS.items():
            lam = list(published.eigenvalues) + tails[group]
            assert retain_components(lam, "kaiser") == len(published.eigenvalues)

    def test_published_forecast_directions(self) -> None:
        cpc1 = [PUBLISHED_FORECAST[y][1]["CPC1"] for y in range(2017, 2021)]
        npc = [PUBLISHED_FORECAST[y][1]["NPC"] for y in range(2017, 2021)]
        assert all(b < a for a, b in zip(cpc1, cpc1[1:]))
        assert all(b > a for a, b in zip(npc, npc[1:]))
        assert {PUBLISHED_FORECAST[y][0] for y in (1990, 1991, 2015, 2016)} == {"actual"}
