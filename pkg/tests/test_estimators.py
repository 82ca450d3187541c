import numpy as np
import pytest
from sklearn.base import clone

from selref import SampleStack, aggregate
from selref.resample import rng_stream
from selref.toybnn import (
    TrainConfig,
    load_model,
    model_from_dict,
    model_to_dict,
    predict_stack,
    save_model,
    train,
)
from selref.toybnn.data import make_blobs, split_indices
from selref.toybnn.estimators import (
    DeepEnsembleClassifier,
    GVIClassifier,
    MapClassifier,
    MCDropoutClassifier,
    MFVIClassifier,
    RadialClassifier,
)

ALL_CLASSES = [
    MapClassifier,
    MCDropoutClassifier,
    MFVIClassifier,
    GVIClassifier,
    RadialClassifier,
    DeepEnsembleClassifier,
]


@pytest.fixture(scope="module")
def separable():
    X, y = make_blobs(400, 2, overlap=0.04, seed=1)
    return X, y


@pytest.fixture(scope="module")
def fitted_mfvi(separable):
    X, y = separable
    return MFVIClassifier(epochs=120, batch_size=64, seed=0).fit(X, y)


class TestSklearnApi:
    @pytest.mark.parametrize("cls", ALL_CLASSES)
    def test_get_set_params_roundtrip(self, cls):
        est = cls(seed=7)
        params = est.get_params()
        assert params["seed"] == 7
        cloned = clone(est)
        assert cloned.get_params() == params

    def test_predict_returns_class_labels(self, separable):
        X, y = separable
        model = MapClassifier(epochs=80, seed=0).fit(X, y)
        pred = model.predict(X)
        assert set(np.unique(pred)) <= {0, 1}
        assert model.classes_.tolist() == [0, 1]

    def test_unfitted_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            MapClassifier().predict_proba(np.zeros((2, 2)))


class TestTrainingRegressions:
    def test_map_separable_blobs_reach_99(self, separable):
        X, y = separable
        model = MapClassifier(epochs=200, seed=0).fit(X, y)
        assert (model.predict(X) == y).mean() >= 0.99

    def test_mfvi_predictive_accuracy(self, separable, fitted_mfvi):
        X, y = separable
        probs = fitted_mfvi.sample_proba(X, n_samples=32, rng=rng_stream(123)).mean(axis=0)
        assert (np.argmax(probs, axis=1) == y).mean() >= 0.95

    def test_training_is_deterministic_per_seed(self, separable):
        X, y = separable
        a = MapClassifier(epochs=40, seed=5).fit(X, y)
        b = MapClassifier(epochs=40, seed=5).fit(X, y)
        for pa, pb in zip(a.params_, b.params_):
            np.testing.assert_array_equal(pa, pb)

    def test_different_seeds_differ(self, separable):
        X, y = separable
        a = MapClassifier(epochs=40, seed=5).fit(X, y)
        b = MapClassifier(epochs=40, seed=6).fit(X, y)
        assert any(not np.array_equal(pa, pb) for pa, pb in zip(a.params_, b.params_))

    def test_train_config_dispatch(self, separable):
        X, y = separable
        for method, cls in (
            ("map", MapClassifier),
            ("mcdropout", MCDropoutClassifier),
            ("mfvi", MFVIClassifier),
            ("gvi", GVIClassifier),
            ("radial", RadialClassifier),
            ("ensemble", DeepEnsembleClassifier),
        ):
            model = train(TrainConfig(method=method, epochs=3, seed=0), X[:50], y[:50])
            assert isinstance(model, cls)

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            TrainConfig(method="laplace")


class TestPredictStack:
    def test_map_samples_identical(self, separable):
        X, y = separable
        model = MapClassifier(epochs=30, seed=0).fit(X, y)
        stack = model.sample_proba(X[:20], n_samples=4)
        for s in range(1, 4):
            np.testing.assert_array_equal(stack[s], stack[0])

    def test_mcdropout_rate_zero_identical(self, separable):
        X, y = separable
        model = MCDropoutClassifier(epochs=30, dropout_rate=0.0, seed=0).fit(X, y)
        stack = model.sample_proba(X[:20], n_samples=4)
        for s in range(1, 4):
            np.testing.assert_array_equal(stack[s], stack[0])

    def test_mcdropout_samples_vary(self, separable):
        X, y = separable
        model = MCDropoutClassifier(epochs=30, dropout_rate=0.3, seed=0).fit(X, y)
        stack = model.sample_proba(X[:20], n_samples=4)
        assert not np.array_equal(stack[0], stack[1])

    def test_mfvi_clamped_scales_give_tiny_variance(self, separable, fitted_mfvi):
        X, _ = separable
        import copy

        clamped = copy.deepcopy(fitted_mfvi)
        for k in range(1, len(clamped.params_), 2):
            clamped.params_[k] = np.full_like(clamped.params_[k], -25.0)  # sigma ~ 1e-11
        stack = clamped.sample_proba(X[:30], n_samples=8, rng=rng_stream(7))
        assert stack.var(axis=0).max() < 1e-6

    def test_ensemble_stack_is_member_predictions(self, separable):
        X, y = separable
        model = DeepEnsembleClassifier(n_members=3, epochs=30, seed=0).fit(X, y)
        stack = model.sample_proba(X[:15])
        assert stack.shape[0] == 3
        for s, member in enumerate(model.members_):
            np.testing.assert_array_equal(stack[s], member.predict_proba(X[:15]))

    def test_ensemble_aggregate_equals_member_mean(self, separable):
        X, y = separable
        model = DeepEnsembleClassifier(n_members=3, epochs=30, seed=0).fit(X, y)
        stack = predict_stack(model, X[:15], y[:15])
        agg = aggregate(stack)
        np.testing.assert_allclose(
            agg.probs, model.predict_proba(X[:15]), atol=1e-12
        )

    def test_predict_stack_returns_valid_stack(self, separable, fitted_mfvi):
        X, y = separable
        stack = predict_stack(fitted_mfvi, X[:25], y[:25], n_samples=5, rng=rng_stream(3))
        assert isinstance(stack, SampleStack)
        assert stack.n_samples == 5
        assert stack.n_examples == 25
        np.testing.assert_allclose(stack.probs.sum(axis=2), 1.0, atol=1e-9)

    def test_rows_valid_for_every_method(self, separable):
        X, y = separable
        for method in ("map", "mcdropout", "mfvi", "gvi", "radial", "ensemble"):
            model = train(TrainConfig(method=method, epochs=5, seed=1), X[:80], y[:80])
            stack = model.sample_proba(X[:10], n_samples=3, rng=rng_stream(11))
            assert np.all(stack >= 0) and np.all(stack <= 1)
            np.testing.assert_allclose(stack.sum(axis=-1), 1.0, atol=1e-9)

    def test_sampling_deterministic_given_rng_seed(self, separable, fitted_mfvi):
        X, _ = separable
        a = fitted_mfvi.sample_proba(X[:10], n_samples=4, rng=rng_stream(42))
        b = fitted_mfvi.sample_proba(X[:10], n_samples=4, rng=rng_stream(42))
        np.testing.assert_array_equal(a, b)


class TestBundle:
    @pytest.mark.parametrize("method", ["map", "mfvi", "radial", "gvi", "ensemble"])
    def test_round_trip_preserves_predictions(self, tmp_path, separable, method):
        X, y = separable
        model = train(TrainConfig(method=method, epochs=5, seed=2), X[:60], y[:60])
        path = tmp_path / "model.json"
        save_model(model, path)
        restored = load_model(path)
        np.testing.assert_array_equal(
            model.predict_proba(X[:10]), restored.predict_proba(X[:10])
        )

    def test_dict_round_trip_exact_arrays(self, separable):
        X, y = separable
        model = train(TrainConfig(method="mfvi", epochs=4, seed=3), X[:60], y[:60])
        restored = model_from_dict(model_to_dict(model))
        for a, b in zip(model.params_, restored.params_):
            np.testing.assert_array_equal(a, b)

    def test_bad_format_rejected(self):
        from selref.exceptions import ParseError

        with pytest.raises(ParseError):
            model_from_dict({"format": "something-else"})


class TestSplitIndices:
    def test_exact_sizes(self):
        tr, va, te = split_indices(1000, (0.7, 0.1, 0.2), rng_stream(0))
        assert (len(tr), len(va), len(te)) == (700, 100, 200)
        combined = np.concatenate([tr, va, te])
        assert len(np.unique(combined)) == 1000

    def test_deterministic(self):
        a = split_indices(500, (0.7, 0.1, 0.2), rng_stream(9))
        b = split_indices(500, (0.7, 0.1, 0.2), rng_stream(9))
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)

    def test_bad_fractions_rejected(self):
        from selref.exceptions import InvalidSpecError

        with pytest.raises(InvalidSpecError):
            split_indices(100, (0.5, 0.2, 0.1), rng_stream(0))
