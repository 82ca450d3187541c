"""Gaussian variational machinery: divergences and weight sampling.

Closed forms
------------
KL between diagonal Gaussians q = N(mu, sigma^2) and p = N(m, s^2),
summed over coordinates:

    KL = sum_j  log(s_j / sigma_j) + [(mu_j - m_j)^2 + sigma_j^2 - s_j^2] / (2 s_j^2)

Renyi alpha-divergence (alpha in (0, 1)) between the same families.
Writing sbar^2 = alpha * s^2 + (1 - alpha) * sigma^2 for the blended
variance, the Gaussian integral

    I = int q^alpha p^(1-alpha)
      = prod_j  sqrt(sigma_j^(2(1-alpha)) s_j^(2 alpha) / sbar_j^2)
        * exp(-alpha (1-alpha) (mu_j - m_j)^2 / (2 sbar_j^2))

follows from completing the square, and

    D_alpha(q || p) = log(I) / (alpha (alpha - 1))
                    = sum_j  (mu_j - m_j)^2 / (2 sbar_j^2)
                      + log(sigma_j^(2(1-alpha)) s_j^(2 alpha) / sbar_j^2)
                        / (2 alpha (alpha - 1))

The 1 / (alpha (alpha - 1)) prefactor keeps the divergence nonnegative
for alpha in (0, 1) (the weighted AM-GM inequality gives I <= 1), zero
exactly when q == p, and symmetric in q and p at alpha = 1/2.

Radial sampling
---------------
The high-dimensional Gaussian concentrates its mass on a thin shell
("soap bubble"), so Gaussian weight noise has norm ~ sqrt(d).  The radial
family instead draws a direction uniformly and a scalar radius from a
univariate normal:

    w = mu + sigma * (eps / ||eps||) * r,   eps ~ N(0, I),  r ~ N(0, 1)

so the normalized residual norm ||(w - mu) / sigma|| equals |r| exactly,
whatever the dimension.
"""

import numpy as np

from ..exceptions import InvalidAlphaError, NonPositiveScaleError


def _check_scales(*scales):
    for s in scales:
        arr = np.asarray(s, dtype=np.float64)
        if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
            raise NonPositiveScaleError("scale parameters must be finite and > 0")


def kl_diag_gaussian(mu, sigma, m=0.0, s=1.0):
    """KL(N(mu, sigma^2) || N(m, s^2)) for diagonal Gaussians, summed."""
    _check_scales(sigma, s)
    mu, sigma = np.asarray(mu, dtype=np.float64), np.asarray(sigma, dtype=np.float64)
    m, s = np.broadcast_to(m, mu.shape), np.broadcast_to(s, mu.shape)
    terms = np.log(s / sigma) + ((mu - m) ** 2 + sigma**2 - s**2) / (2.0 * s**2)
    return float(np.sum(terms))


def renyi_divergence_diag(q, p, alpha):
    """Renyi alpha-divergence between diagonal Gaussians q and p.

    q and p are (mu, sigma) pairs of equal-shape arrays; alpha must lie in
    (0, 1).  Returns the coordinate-summed closed form derived in the
    module docstring.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidAlphaError(f"alpha must be in (0, 1), got {alpha}")
    mu_q, sigma_q = (np.asarray(a, dtype=np.float64) for a in q)
    mu_p, sigma_p = (np.asarray(a, dtype=np.float64) for a in p)
    _check_scales(sigma_q, sigma_p)
    blended = alpha * sigma_p**2 + (1.0 - alpha) * sigma_q**2
    quad = (mu_q - mu_p) ** 2 / (2.0 * blended)
    log_ratio = np.log(sigma_q ** (2.0 * (1.0 - alpha)) * sigma_p ** (2.0 * alpha) / blended)
    return float(np.sum(quad + log_ratio / (2.0 * alpha * (alpha - 1.0))))


def radial_sample(mu, sigma, rng, size=None, dtype=np.float64):
    """Draw from the radial family around (mu, sigma).

    One parameter tensor counts as one weight vector: the direction noise
    is normalized over all its entries.  Per draw, `rng` is consumed in a
    fixed order: the direction noise eps (mu.size values), then the scalar
    radius r.  With ``size=k`` the draws are vectorized as (k, *mu.shape):
    all eps first, then all radii.  ``dtype`` selects the generation
    precision for bulk statistical use; the default is float64.
    """
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if np.any(sigma < 0.0):
        raise NonPositiveScaleError("sigma must be >= 0")
    if size is None:
        eps = rng.standard_normal(mu.shape, dtype=dtype)
        r = rng.standard_normal(dtype=dtype)
        norm = np.sqrt(np.sum(np.square(eps, dtype=np.float64)))
        return mu + sigma * (eps / norm) * float(r)
    eps = rng.standard_normal((size,) + mu.shape, dtype=dtype)
    r = rng.standard_normal(size, dtype=dtype)
    flat = eps.reshape(size, -1)
    norms = np.sqrt(np.einsum("ij,ij->i", flat, flat, dtype=np.float64))
    scale = (np.asarray(r, dtype=np.float64) / norms).astype(dtype)
    # scale rows in place: bulk draws at large d are memory-bound
    flat *= scale[:, None]
    draws = flat.reshape((size,) + mu.shape)
    if np.any(sigma != 1.0):
        draws = draws * sigma.astype(dtype, copy=False)
    if np.any(mu != 0.0):
        draws = draws + mu.astype(dtype, copy=False)
    return draws


def gaussian_sample(mu, sigma, rng):
    """Reparameterized draw mu + sigma * eps with eps ~ N(0, I)."""
    mu = np.asarray(mu, dtype=np.float64)
    return mu + np.asarray(sigma, dtype=np.float64) * rng.standard_normal(mu.shape)
