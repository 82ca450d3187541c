import numpy as np
import pytest

from oracles import pair_count_auc, rational_kappa
from selref import (
    ConfusionMatrix,
    PredictionSet,
    confusion_from,
    expected_agreement,
    qwk,
    roc_auc,
)
from selref.exceptions import (
    DegenerateAgreementError,
    EmptyMatrixError,
    ShapeMismatchError,
    SingleClassError,
)
from selref.metrics import kappa_unit


def random_confusion(rng, m, scale=20):
    return ConfusionMatrix(rng.integers(0, scale, size=(m, m)))


class TestConfusionFrom:
    def test_perfect_predictions_are_diagonal(self):
        p = PredictionSet(probs=[[0.9, 0.1], [0.2, 0.8]], labels=[0, 1])
        np.testing.assert_array_equal(confusion_from(p).counts, [[1, 0], [0, 1]])

    def test_tie_breaks_to_lowest_class(self):
        p = PredictionSet(probs=[[0.5, 0.5]], labels=[1])
        np.testing.assert_array_equal(confusion_from(p).counts, [[0, 1], [0, 0]])

    def test_matches_per_example_recount(self):
        rng = np.random.default_rng(5)
        raw = rng.random((200, 4)) + 1e-3
        probs = raw / raw.sum(axis=1, keepdims=True)
        labels = rng.integers(0, 4, size=200)
        p = PredictionSet(probs=probs, labels=labels)
        counts = np.zeros((4, 4), dtype=int)
        for i in range(200):
            best = 0
            for j in range(1, 4):
                if p.probs[i, j] > p.probs[i, best]:
                    best = j
            counts[best, labels[i]] += 1
        np.testing.assert_array_equal(confusion_from(p).counts, counts)


class TestExpectedAgreement:
    def test_uniform_marginals(self):
        e = expected_agreement(ConfusionMatrix([[1, 0], [0, 1]]))
        np.testing.assert_allclose(e.values, [[0.5, 0.5], [0.5, 0.5]])

    def test_degenerate_single_class(self):
        e = expected_agreement(ConfusionMatrix([[2, 0], [0, 0]]))
        np.testing.assert_allclose(e.values, [[2.0, 0.0], [0.0, 0.0]])

    def test_matches_outer_product_oracle(self):
        rng = np.random.default_rng(9)
        c = random_confusion(rng, 5)
        e = expected_agreement(c)
        rows = c.counts.sum(axis=1)
        cols = c.counts.sum(axis=0)
        for i in range(5):
            for j in range(5):
                assert abs(e.values[i, j] - rows[i] * cols[j] / c.total) < 1e-12

    def test_preserves_total_mass(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            c = random_confusion(rng, int(rng.integers(2, 7)))
            if c.total == 0:
                continue
            assert abs(expected_agreement(c).values.sum() - c.total) < 1e-9

    def test_empty_matrix_rejected(self):
        with pytest.raises(EmptyMatrixError):
            expected_agreement(ConfusionMatrix(np.zeros((3, 3), dtype=int)))


class TestQwk:
    def test_diagonal_is_perfect(self):
        for m in range(2, 7):
            c = ConfusionMatrix(np.diag(np.arange(1, m + 1)))
            assert qwk(c) == 100.0

    def test_all_equal_cells_is_chance(self):
        c = ConfusionMatrix(np.full((4, 4), 3))
        assert qwk(c) == pytest.approx(0.0, abs=1e-12)

    def test_against_rational_oracle(self):
        c = ConfusionMatrix([[5, 1, 0], [1, 3, 1], [0, 2, 4]])
        expected = float(rational_kappa(c.counts))
        assert qwk(c, scale_100=False) == pytest.approx(expected, abs=1e-15)

    def test_rational_oracle_sweep(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            m = int(rng.integers(2, 7))
            c = random_confusion(rng, m)
            if c.total == 0:
                continue
            expected = rational_kappa(c.counts)
            assert expected is not None
            assert qwk(c, scale_100=False) == pytest.approx(float(expected), abs=1e-12)

    def test_scale_invariance_under_count_multiplication(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            c = random_confusion(rng, 4)
            if c.total == 0:
                continue
            scaled = ConfusionMatrix(c.counts * 7)
            assert qwk(c) == qwk(scaled)

    def test_transpose_symmetry(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            c = random_confusion(rng, 5)
            if c.total == 0:
                continue
            assert qwk(c) == pytest.approx(qwk(ConfusionMatrix(c.counts.T)), abs=1e-12)

    def test_degenerate_marginal_returns_perfect(self):
        # all mass in one diagonal cell: numerator and denominator both 0
        assert qwk(ConfusionMatrix([[7, 0], [0, 0]])) == 100.0

    def test_degenerate_agreement_unreachable_for_valid_counts(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            c = random_confusion(rng, 3, scale=3)
            if c.total == 0:
                continue
            qwk(c)  # must never raise DegenerateAgreementError

    def test_float_path_matches_integer_path(self):
        rng = np.random.default_rng(37)
        c = random_confusion(rng, 5)
        assert kappa_unit(c.counts.astype(float)) == pytest.approx(
            kappa_unit(c.counts), abs=1e-12
        )


class TestRocAuc:
    def test_perfect_separation(self):
        assert roc_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 100.0

    def test_all_scores_equal_is_half(self):
        assert roc_auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 50.0

    def test_documented_example(self):
        value = roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1])
        assert value == pytest.approx(pair_count_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]), abs=1e-12)

    def test_pair_count_oracle_with_ties(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            n = int(rng.integers(2, 60))
            scores = rng.integers(0, 6, size=n) / 5.0  # heavy ties
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                continue
            assert roc_auc(scores, labels) == pytest.approx(
                pair_count_auc(scores, labels), abs=1e-12
            )

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassError):
            roc_auc([0.1, 0.9], [1, 1])

    def test_complement_identity(self):
        rng = np.random.default_rng(43)
        for _ in range(30):
            n = int(rng.integers(4, 80))
            scores = rng.random(n).round(1)
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                continue
            assert roc_auc(scores, labels) + roc_auc(-scores, labels) == pytest.approx(
                100.0, abs=1e-9
            )

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(47)
        scores = rng.random(50).round(2)
        labels = rng.integers(0, 2, size=50)
        labels[0], labels[1] = 0, 1
        assert roc_auc(scores, labels) == roc_auc(np.exp(3 * scores), labels)

    def test_misaligned_inputs_rejected(self):
        with pytest.raises(ShapeMismatchError):
            roc_auc([0.1, 0.2], [0, 1, 1])


class TestDegenerateAgreementError:
    def test_raised_on_corrupted_input(self):
        # bypass ConfusionMatrix validation to simulate corruption: both
        # marginals concentrate on class 0 (denominator 0) yet off-diagonal
        # weighted mass remains, impossible for real non-negative counts
        corrupted = np.array([[3, -1, 1], [0, 1, -1], [0, 0, 0]], dtype=object)
        with pytest.raises(DegenerateAgreementError):
            kappa_unit(corrupted)
