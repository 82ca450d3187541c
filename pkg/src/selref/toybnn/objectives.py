"""Training objectives (MAP, mean-field/radial/generalized variational).

Every objective takes the flat parameter list as plain ndarrays plus an
explicit noise structure, and returns ``(loss, grads, parts)`` where
`grads` aligns with the parameter list and `parts` exposes the unscaled
terms (useful for tests and logging).  Passing the noise explicitly is
what makes the finite-difference gradient checks possible: the same noise
is replayed at the perturbed parameters.

Variational parameters interleave as [mu_0, rho_0, mu_1, rho_1, ...] with
one (mu, rho) pair per base parameter tensor (layer weights and biases in
order) and sigma = softplus(rho).  Divergence terms are scaled by
batch_size / dataset_size so that summing the per-batch objectives over
one epoch charges the divergence exactly once.
"""

import math

import numpy as np

from ..exceptions import NonFiniteError
from .autodiff import parameter
from .network import forward_logits

LOG_2PI = math.log(2.0 * math.pi)


def _nll_sum(weights, biases, inputs, labels, masks=None):
    logits = forward_logits(weights, biases, inputs, masks=masks)
    return -(logits.log_softmax().pick(labels).sum())


def _check_finite(loss, grads):
    if not np.isfinite(loss) or any(not np.all(np.isfinite(g)) for g in grads):
        raise NonFiniteError("objective produced a non-finite value")


def _finish(loss_t, tensors, parts):
    loss_t.backward()
    loss = float(loss_t.value)
    grads = [np.zeros_like(t.value) if t.grad is None else t.grad for t in tensors]
    _check_finite(loss, grads)
    return loss, grads, parts


def map_loss(params, inputs, labels, l2_weight=0.0, masks=None):
    """Summed NLL plus L2 weight decay (weights only, not biases).

    `params` is the flat [W0, b0, W1, b1, ...] list; `masks` are optional
    dropout masks for the hidden layers.
    """
    tensors = [parameter(p) for p in params]
    weights, biases = tensors[0::2], tensors[1::2]
    nll = _nll_sum(weights, biases, inputs, labels, masks=masks)
    loss = nll
    if l2_weight:
        l2 = (weights[0] ** 2).sum()
        for w in weights[1:]:
            l2 = l2 + (w ** 2).sum()
        loss = nll + l2_weight * l2
    return _finish(loss, tensors, {"nll": float(nll.value)})


def _kl_std_normal(mu, sigma):
    """KL to the standard normal prior; mirrors kl_diag_gaussian term by term."""
    return ((1.0 / sigma).log() + ((mu - 0.0) ** 2 + sigma**2 - 1.0) / 2.0).sum()


def _renyi_std_normal(mu, sigma, alpha):
    """Renyi divergence to the standard normal prior; mirrors
    renyi_divergence_diag term by term (sigma_p = 1, mu_p = 0)."""
    blended = alpha * 1.0 + (1.0 - alpha) * sigma**2
    quad = (mu - 0.0) ** 2 / (2.0 * blended)
    log_ratio = (sigma ** (2.0 * (1.0 - alpha)) * 1.0 / blended).log()
    return (quad + log_ratio / (2.0 * alpha * (alpha - 1.0))).sum()


def sample_gaussian_noise(shapes, n_mc, rng):
    """n_mc lists of standard-normal arrays, one per base parameter."""
    return [[rng.standard_normal(shape) for shape in shapes] for _ in range(n_mc)]


def sample_radial_noise(shapes, n_mc, rng):
    """n_mc lists of (direction noise, scalar radius) per base parameter."""
    return [
        [(rng.standard_normal(shape), float(rng.standard_normal())) for shape in shapes]
        for _ in range(n_mc)
    ]


def _variational_terms(params):
    tensors = [parameter(p) for p in params]
    mus, rhos = tensors[0::2], tensors[1::2]
    sigmas = [rho.softplus() for rho in rhos]
    return tensors, mus, sigmas


def _gaussian_nll(mus, sigmas, noise, inputs, labels):
    total = None
    for eps_list in noise:
        thetas = [mu + sig * eps for mu, sig, eps in zip(mus, sigmas, eps_list)]
        nll = _nll_sum(thetas[0::2], thetas[1::2], inputs, labels)
        total = nll if total is None else total + nll
    return total / len(noise)


def elbo_mfvi(params, inputs, labels, noise, kl_scale=1.0):
    """Negated minibatch ELBO: mean MC NLL plus scaled closed-form KL.

    `noise` comes from :func:`sample_gaussian_noise` (frozen for gradient
    checks); the reparameterized weights are mu + sigma * eps.
    """
    tensors, mus, sigmas = _variational_terms(params)
    nll = _gaussian_nll(mus, sigmas, noise, inputs, labels)
    kl_value = 0.0
    kl = None
    for mu, sigma in zip(mus, sigmas):
        piece = _kl_std_normal(mu, sigma)
        kl = piece if kl is None else kl + piece
        kl_value += float(piece.value)
    loss = nll + kl_scale * kl
    parts = {"nll": float(nll.value), "divergence": kl_value, "scale": kl_scale}
    return _finish(loss, tensors, parts)


def gvi_objective(params, inputs, labels, noise, alpha=0.5, div_scale=1.0):
    """Generalized variational loss: mean MC NLL plus scaled Renyi divergence.

    Identical to :func:`elbo_mfvi` except that the closed-form KL is
    replaced by the Renyi alpha-divergence to the same standard-normal
    prior.
    """
    tensors, mus, sigmas = _variational_terms(params)
    nll = _gaussian_nll(mus, sigmas, noise, inputs, labels)
    div_value = 0.0
    div = None
    for mu, sigma in zip(mus, sigmas):
        piece = _renyi_std_normal(mu, sigma, alpha)
        div = piece if div is None else div + piece
        div_value += float(piece.value)
    loss = nll + div_scale * div
    parts = {"nll": float(nll.value), "divergence": div_value, "scale": div_scale}
    return _finish(loss, tensors, parts)


def radial_objective(params, inputs, labels, noise, div_scale=1.0):
    """Radial variational loss, optimized up to an additive constant.

    The radial family has no closed-form density, so the divergence term
    is assembled from a Monte Carlo cross-entropy against the
    standard-normal prior (-E_q[log p(theta)], evaluated at the same
    radial samples as the likelihood) minus the location-scale entropy
    surrogate sum_j log sigma_j; the entropy constant of the radial base
    distribution is dropped.
    """
    tensors, mus, sigmas = _variational_terms(params)
    nll = None
    cross = None
    n_dim = sum(int(np.prod(p.shape)) for p in params[0::2])
    for pieces in noise:
        thetas = []
        sq_sum = None
        for mu, sigma, (eps, radius) in zip(mus, sigmas, pieces):
            direction = eps / np.linalg.norm(eps)
            theta = mu + sigma * (direction * radius)
            thetas.append(theta)
            piece = (theta**2).sum()
            sq_sum = piece if sq_sum is None else sq_sum + piece
        sample_nll = _nll_sum(thetas[0::2], thetas[1::2], inputs, labels)
        nll = sample_nll if nll is None else nll + sample_nll
        # -log N(theta; 0, I) = ||theta||^2 / 2 + (d/2) log(2 pi)
        sample_cross = sq_sum / 2.0 + (n_dim / 2.0) * LOG_2PI
        cross = sample_cross if cross is None else cross + sample_cross
    n_mc = len(noise)
    nll = nll / n_mc
    cross = cross / n_mc
    entropy = None
    for sigma in sigmas:
        piece = sigma.log().sum()
        entropy = piece if entropy is None else entropy + piece
    divergence = cross - entropy
    loss = nll + div_scale * divergence
    parts = {
        "nll": float(nll.value),
        "cross_entropy": float(cross.value),
        "entropy_surrogate": float(entropy.value),
        "divergence": float(divergence.value),
        "scale": div_scale,
    }
    return _finish(loss, tensors, parts)


def grad_check(objective, params, n_coords=30, step=1e-5, seed=0):
    """Max relative error between analytic and central-difference gradients.

    `objective` maps the parameter list to (loss, grads, parts) and must
    be deterministic (freeze any sampling noise before calling).  A random
    subset of up to `n_coords` coordinates per parameter is probed with
    per-coordinate step ``step * (1 + |x|)``.
    """
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    loss, grads, _ = objective(params)
    if not np.isfinite(loss):
        raise NonFiniteError("objective is non-finite at the evaluation point")
    worst = 0.0
    for pi, p in enumerate(params):
        flat = p.reshape(-1)
        n = flat.shape[0]
        coords = rng.choice(n, size=min(n_coords, n), replace=False)
        for ci in coords:
            h = step * (1.0 + abs(flat[ci]))
            bumped = [q.copy() for q in params]
            bumped[pi].reshape(-1)[ci] = flat[ci] + h
            up, _, _ = objective(bumped)
            bumped[pi].reshape(-1)[ci] = flat[ci] - h
            down, _, _ = objective(bumped)
            numeric = (up - down) / (2.0 * h)
            analytic = grads[pi].reshape(-1)[ci]
            if not np.isfinite(numeric):
                raise NonFiniteError("finite-difference probe is non-finite")
            err = abs(analytic - numeric) / (abs(numeric) + 1e-8)
            worst = max(worst, err)
    return worst
