"""Scikit-learn style classifiers for the five approximation methods.

Each estimator wraps the same tiny tanh MLP and differs only in its
training objective and in how test-time prediction samples are drawn:

* MapClassifier: point estimate; L2 weight decay plus (optionally)
  dropout during training, deterministic at test time.
* MCDropoutClassifier: trained like the MAP network; keeps dropout
  active at test time, one sampled mask set per draw.
* MFVIClassifier: factorized Gaussian posterior trained on the negated
  ELBO; draws reparameterized weights at test time.
* RadialClassifier: direction-uniform, scalar-radius posterior trained
  on the stochastic divergence estimate.
* GVIClassifier: Gaussian posterior with the Renyi divergence (alpha
  0.5 by default) in place of the KL.
* DeepEnsembleClassifier: independently initialized MAP networks whose
  predictions are averaged; each member is one "sample".

All estimators follow the fit/predict/predict_proba/get_params contract,
so they compose with scikit-learn model selection utilities.  Every
random draw comes from a Philox (seed, stream) pair: stream 0 trains,
stream 1 is the default prediction stream, ensemble member i trains on
stream 2 + i.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ..exceptions import DivergedError, ShapeMismatchError
from ..resample import rng_stream
from .network import ToyMlp, forward, init_mlp, sample_dropout_masks
from .objectives import (
    elbo_mfvi,
    gvi_objective,
    map_loss,
    radial_objective,
    sample_gaussian_noise,
    sample_radial_noise,
)
from .variational import gaussian_sample, radial_sample

TRAIN_STREAM = 0
PREDICT_STREAM = 1
MEMBER_STREAM_BASE = 2

RHO_INIT = -5.0  # softplus(-5) ~ 6.7e-3 initial posterior scale


def softplus(x):
    return np.logaddexp(0.0, x)


class _Adam:
    """Adam with the usual defaults (b1 0.9, b2 0.999, eps 1e-8)."""

    def __init__(self, params, learning_rate):
        self.lr = learning_rate
        self.b1, self.b2, self.eps = 0.9, 0.999, 1e-8
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = self.b1 * self.m[i] + (1 - self.b1) * g
            self.v[i] = self.b2 * self.v[i] + (1 - self.b2) * g * g
            m_hat = self.m[i] / (1 - self.b1**self.t)
            v_hat = self.v[i] / (1 - self.b2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class _BaseToyClassifier(ClassifierMixin, BaseEstimator):
    """Shared fit/predict plumbing; subclasses define the objective."""

    def __init__(
        self,
        hidden_layer_sizes=(16, 16),
        epochs=150,
        batch_size=32,
        learning_rate=0.01,
        seed=0,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed

    # subclass hooks -------------------------------------------------------

    def _init_params(self, layer_sizes, rng):
        raise NotImplementedError

    def _batch_objective(self, params, X, y, n_train, rng):
        raise NotImplementedError

    def _sample_once(self, X, rng):
        raise NotImplementedError

    # fitting ---------------------------------------------------------------

    def _validate_xy(self, X, y):
        X = check_array(X, dtype=np.float64)
        y = np.asarray(y)
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ShapeMismatchError("y must be 1-D and aligned with X")
        y = y.astype(np.int64)
        if y.min() < 0:
            raise ValueError("labels must be non-negative class indices")
        return X, y

    def fit(self, X, y, n_classes=None):
        """Minibatch Adam on the method's objective; deterministic per seed."""
        X, y = self._validate_xy(X, y)
        m = int(y.max()) + 1 if n_classes is None else int(n_classes)
        self.classes_ = np.arange(m)
        self.n_features_in_ = X.shape[1]
        layer_sizes = (X.shape[1], *self.hidden_layer_sizes, m)
        rng = rng_stream(self.seed, self._train_stream())
        params = self._init_params(layer_sizes, rng)
        self._run_adam(params, X, y, rng)
        self.layer_sizes_ = layer_sizes
        self.params_ = params
        return self

    def _run_adam(self, params, X, y, rng):
        n = X.shape[0]
        opt = _Adam(params, self.learning_rate)
        batch = min(self.batch_size, n)
        self.loss_curve_ = []
        for _ in range(self.epochs):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, batch):
                take = order[start : start + batch]
                loss, grads, _ = self._batch_objective(params, X[take], y[take], n, rng)
                if not np.isfinite(loss):
                    raise DivergedError("training loss became non-finite")
                opt.step(params, grads)
                epoch_loss += loss
            self.loss_curve_.append(epoch_loss)

    # prediction -------------------------------------------------------------

    def _train_stream(self):
        return TRAIN_STREAM

    def _default_rng(self):
        return rng_stream(self.seed, PREDICT_STREAM)

    def _check_inputs(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ShapeMismatchError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return X

    def sample_proba(self, X, n_samples=16, rng=None):
        """Stack of per-draw class probabilities, shape (S, N, M)."""
        X = self._check_inputs(X)
        if n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if rng is None:
            rng = self._default_rng()
        return np.stack([self._sample_once(X, rng) for _ in range(n_samples)])

    def predict_proba(self, X, n_samples=None, rng=None):
        """Posterior-predictive probabilities: the mean over draws."""
        if n_samples is None:
            n_samples = self.default_samples_
        return self.sample_proba(X, n_samples=n_samples, rng=rng).mean(axis=0)

    def predict(self, X, n_samples=None, rng=None):
        proba = self.predict_proba(X, n_samples=n_samples, rng=rng)
        return self.classes_[np.argmax(proba, axis=1)]


class MapClassifier(_BaseToyClassifier):
    """Point-estimate network with L2 decay and training-time dropout."""

    default_samples_ = 1

    def __init__(
        self,
        hidden_layer_sizes=(16, 16),
        epochs=150,
        batch_size=32,
        learning_rate=0.01,
        seed=0,
        l2_weight=1e-4,
        dropout_rate=0.1,
    ):
        super().__init__(hidden_layer_sizes, epochs, batch_size, learning_rate, seed)
        self.l2_weight = l2_weight
        self.dropout_rate = dropout_rate

    def _init_params(self, layer_sizes, rng):
        net = init_mlp(layer_sizes, rng, dropout_rate=self.dropout_rate)
        params = []
        for w, b in zip(net.weights, net.biases):
            params.extend([w, b])
        return params

    def _net(self, params=None):
        params = self.params_ if params is None else params
        return ToyMlp(
            self.layer_sizes_,
            params[0::2],
            params[1::2],
            dropout_rate=self.dropout_rate,
        )

    def _batch_objective(self, params, X, y, n_train, rng):
        masks = None
        if self.dropout_rate > 0.0:
            net = ToyMlp(
                tuple([X.shape[1], *self.hidden_layer_sizes, len(self.classes_)]),
                params[0::2],
                params[1::2],
                dropout_rate=self.dropout_rate,
            )
            masks = sample_dropout_masks(net, X.shape[0], rng)
        return map_loss(params, X, y, l2_weight=self.l2_weight, masks=masks)

    def _sample_once(self, X, rng):
        return forward(self._net(), X)


class MCDropoutClassifier(MapClassifier):
    """Same training as the MAP network; dropout stays on at test time."""

    default_samples_ = 16

    def __init__(
        self,
        hidden_layer_sizes=(16, 16),
        epochs=150,
        batch_size=32,
        learning_rate=0.01,
        seed=0,
        l2_weight=1e-4,
        dropout_rate=0.2,
    ):
        super().__init__(
            hidden_layer_sizes,
            epochs,
            batch_size,
            learning_rate,
            seed,
            l2_weight=l2_weight,
            dropout_rate=dropout_rate,
        )

    def _sample_once(self, X, rng):
        net = self._net()
        masks = sample_dropout_masks(net, X.shape[0], rng) if net.dropout_rate else None
        return forward(net, X, masks=masks)


class _VariationalClassifier(_BaseToyClassifier):
    """Shared machinery for the Gaussian-family posteriors."""

    default_samples_ = 16

    def __init__(
        self,
        hidden_layer_sizes=(16, 16),
        epochs=150,
        batch_size=32,
        learning_rate=0.01,
        seed=0,
        n_train_mc=1,
    ):
        super().__init__(hidden_layer_sizes, epochs, batch_size, learning_rate, seed)
        self.n_train_mc = n_train_mc

    def _init_params(self, layer_sizes, rng):
        net = init_mlp(layer_sizes, rng)
        params = []
        for w, b in zip(net.weights, net.biases):
            params.extend([w, np.full_like(w, RHO_INIT)])
            params.extend([b, np.full_like(b, RHO_INIT)])
        return params

    def _base_shapes(self, params):
        return [p.shape for p in params[0::2]]

    def _posterior(self):
        mus = self.params_[0::2]
        sigmas = [softplus(rho) for rho in self.params_[1::2]]
        return mus, sigmas

    def _sample_theta(self, mus, sigmas, rng):
        raise NotImplementedError

    def _sample_once(self, X, rng):
        mus, sigmas = self._posterior()
        thetas = self._sample_theta(mus, sigmas, rng)
        net = ToyMlp(self.layer_sizes_, thetas[0::2], thetas[1::2])
        return forward(net, X)


class MFVIClassifier(_VariationalClassifier):
    """Mean-field Gaussian posterior trained on the negated ELBO."""

    def _batch_objective(self, params, X, y, n_train, rng):
        noise = sample_gaussian_noise(self._base_shapes(params), self.n_train_mc, rng)
        return elbo_mfvi(params, X, y, noise, kl_scale=X.shape[0] / n_train)

    def _sample_theta(self, mus, sigmas, rng):
        return [gaussian_sample(mu, sig, rng) for mu, sig in zip(mus, sigmas)]


class GVIClassifier(_VariationalClassifier):
    """Gaussian posterior with the Renyi divergence in place of the KL."""

    def __init__(
        self,
        hidden_layer_sizes=(16, 16),
        epochs=150,
        batch_size=32,
        learning_rate=0.01,
        seed=0,
        n_train_mc=1,
        alpha=0.5,
    ):
        super().__init__(
            hidden_layer_sizes, epochs, batch_size, learning_rate, seed, n_train_mc
        )
        self.alpha = alpha

    def _batch_objective(self, params, X, y, n_train, rng):
        noise = sample_gaussian_noise(self._base_shapes(params), self.n_train_mc, rng)
        return gvi_objective(
            params, X, y, noise, alpha=self.alpha, div_scale=X.shape[0] / n_train
        )

    def _sample_theta(self, mus, sigmas, rng):
        return [gaussian_sample(mu, sig, rng) for mu, sig in zip(mus, sigmas)]


class RadialClassifier(_VariationalClassifier):
    """Direction-uniform posterior with a scalar normal radius."""

    def _batch_objective(self, params, X, y, n_train, rng):
        noise = sample_radial_noise(self._base_shapes(params), self.n_train_mc, rng)
        return radial_objective(params, X, y, noise, div_scale=X.shape[0] / n_train)

    def _sample_theta(self, mus, sigmas, rng):
        return [radial_sample(mu, sig, rng) for mu, sig in zip(mus, sigmas)]


class DeepEnsembleClassifier(ClassifierMixin, BaseEstimator):
    """Average of independently initialized MAP networks.

    Member i trains with the shared seed on Philox stream 2 + i, so
    members differ in initialization and batching but the whole ensemble
    is reproducible from one seed.  Prediction stacks contain one sample
    per member; a requested sample count is ignored.
    """

    def __init__(
        self,
        n_members=3,
        hidden_layer_sizes=(16, 16),
        epochs=150,
        batch_size=32,
        learning_rate=0.01,
        seed=0,
        l2_weight=1e-4,
        dropout_rate=0.1,
    ):
        self.n_members = n_members
        self.hidden_layer_sizes = hidden_layer_sizes
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed
        self.l2_weight = l2_weight
        self.dropout_rate = dropout_rate

    def fit(self, X, y, n_classes=None):
        if self.n_members < 1:
            raise ValueError("n_members must be >= 1")
        members = []
        for i in range(self.n_members):
            member = MapClassifier(
                hidden_layer_sizes=self.hidden_layer_sizes,
                epochs=self.epochs,
                batch_size=self.batch_size,
                learning_rate=self.learning_rate,
                seed=self.seed,
                l2_weight=self.l2_weight,
                dropout_rate=self.dropout_rate,
            )
            member._train_stream = lambda i=i: MEMBER_STREAM_BASE + i
            members.append(member.fit(X, y, n_classes=n_classes))
        self.members_ = members
        self.classes_ = members[0].classes_
        self.n_features_in_ = members[0].n_features_in_
        return self

    def sample_proba(self, X, n_samples=None, rng=None):
        """One probability matrix per member, shape (n_members, N, M)."""
        check_is_fitted(self, "members_")
        return np.stack([m._sample_once(m._check_inputs(X), rng) for m in self.members_])

    def predict_proba(self, X, n_samples=None, rng=None):
        return self.sample_proba(X).mean(axis=0)

    def predict(self, X, n_samples=None, rng=None):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


METHODS = {
    "map": MapClassifier,
    "mcdropout": MCDropoutClassifier,
    "mfvi": MFVIClassifier,
    "gvi": GVIClassifier,
    "radial": RadialClassifier,
    "ensemble": DeepEnsembleClassifier,
}
