"""Posterior-mean predictive estimators for species sampling.

Given a basic sample and ``m`` further observations still to be seen, these
estimate the probability that observation ``n+m+1`` belongs to a species
represented ``l`` times, split by whether that species is new (first seen
in the additional sample) or old (already in the basic sample).
"""
from __future__ import annotations

from collections import Counter

import numpy as np
from sklearn.base import BaseEstimator

from ._common import lfact, rising
from .conditional import base_weight, old_mass
from .models import GibbsModel, PitmanYor
from .numeric import SignedLogValue, slv_sum, to_probability
from .polya import _blocks_joint, _eligible
from .stirling import stirling_table
from .structures import ObservedSample, as_sample


def one_step_old_l(model: GibbsModel, sample, l: int) -> float:
    """Probability that observation ``n+1`` hits a species seen ``l`` times."""
    sample = as_sample(sample)
    if l < 1:
        raise ValueError("l must be positive")
    c = sample.count_of(l)
    if c == 0:
        return 0.0
    ratio = model.weight(sample.n + 1, sample.j) / base_weight(model, sample)
    return to_probability(ratio * SignedLogValue.from_real(c * (l - model.alpha)), "one-step old")


def discovery_probability(model: GibbsModel, sample, m: int = 0) -> float:
    """Probability that observation ``n+m+1`` is a species unseen so far.

    For ``m = 0`` this is ``V(n+1, j+1) / V(n, j)``; for ``m > 0`` it is the
    posterior mean over the number of new species created in between.
    """
    sample = as_sample(sample)
    base = base_weight(model, sample)
    if m == 0:
        return to_probability(model.weight(sample.n + 1, sample.j + 1) / base, "discovery")
    a = model.alpha
    table = stirling_table(a, m, -old_mass(a, sample))
    top = sample.n + m + 1
    value = slv_sum(model.weight(top, sample.j + k + 1) * table(m, k) for k in range(0, m + 1))
    return to_probability(value / base, "discovery")


def estimate_new_l(model: GibbsModel, sample, m: int, l: int) -> float:
    """Probability that observation ``n+m+1`` hits a new species seen ``l`` times.

    Zero when ``l > m``: no new species can reach that size.
    """
    sample = as_sample(sample)
    if l < 1:
        raise ValueError("l must be positive")
    if l > m:
        return 0.0
    a = model.alpha
    table = stirling_table(a, m - l, -old_mass(a, sample))
    top = sample.n + m + 1
    inner = slv_sum(model.weight(top, sample.j + k) * table(m - l, k - 1) for k in range(1, m - l + 2))
    coef = SignedLogValue(1, lfact(m) - lfact(l) - lfact(m - l)) * rising(1.0 - a, l - 1)
    coef = coef * SignedLogValue.from_real(l - a)
    return to_probability(coef * inner / base_weight(model, sample), "new-species estimator")


def estimate_old_l(model: GibbsModel, sample, m: int, l: int) -> float:
    """Probability that observation ``n+m+1`` hits an old species seen ``l`` times.

    Old species with equal multiplicities contribute equally, so the sum
    runs over distinct multiplicity values weighted by their frequency.
    """
    sample = as_sample(sample)
    if l < 1:
        raise ValueError("l must be positive")
    a = model.alpha
    top = sample.n + m + 1
    terms = []
    for xi, freq in Counter(sample.multiplicities).items():
        if xi > l or l - xi > m:
            continue
        rest = m - l + xi
        table = stirling_table(a, rest, -(old_mass(a, sample) + a - xi))
        inner = slv_sum(model.weight(top, sample.j + k) * table(rest, k) for k in range(0, rest + 1))
        coef = SignedLogValue(1, lfact(m) - lfact(l - xi) - lfact(rest)) * rising(xi - a, l - xi)
        terms.append(SignedLogValue.from_real(freq) * coef * inner)
    if not terms:
        return 0.0
    value = slv_sum(terms) * SignedLogValue.from_real(l - a) / base_weight(model, sample)
    return to_probability(value, "old-species estimator")


def estimate_old_l_blockwise(model: GibbsModel, sample, m: int, l: int) -> float:
    """Same quantity as :func:`estimate_old_l`, summed block by block."""
    sample = as_sample(sample)
    terms = [
        _blocks_joint(model, sample, m, (i,), (l - sample.multiplicities[i],), shift=1)
        for i in _eligible(sample, l)
    ]
    return to_probability(slv_sum(terms) * SignedLogValue.from_real(l - model.alpha), "old-species estimator")


def _as_abundance(X) -> ObservedSample:
    arr = np.asarray(X)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a 1-d array of species counts, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)) or np.any(arr < 1):
        raise ValueError("species counts must be positive integers")
    return ObservedSample(tuple(int(x) for x in arr))


class SpeciesSamplingEstimator(BaseEstimator):
    """Gibbs-prior predictive estimator with a scikit-learn style interface.

    Parameters
    ----------
    alpha, theta : float
        Pitman-Yor parameters, used when ``model`` is None.
    model : GibbsModel, optional
        Any Gibbs weight provider; overrides ``alpha``/``theta``.
    """

    def __init__(self, alpha: float = 0.0, theta: float = 1.0, model: GibbsModel | None = None):
        self.alpha = alpha
        self.theta = theta
        self.model = model

    def fit(self, X, y=None):
        """Store the abundance vector ``X`` (one positive count per species)."""
        self.model_ = self.model if self.model is not None else PitmanYor(self.alpha, self.theta)
        self.sample_ = _as_abundance(X)
        base_weight(self.model_, self.sample_)
        self.n_samples_seen_ = self.sample_.n
        self.n_species_ = self.sample_.j
        return self

    def _check_fitted(self):
        if not hasattr(self, "sample_"):
            raise AttributeError("estimator is not fitted; call fit first")

    def discovery_probability(self, m: int = 0) -> float:
        self._check_fitted()
        return discovery_probability(self.model_, self.sample_, m)

    def predict_new(self, m: int) -> np.ndarray:
        """Array ``p[l-1]`` for ``l = 1..m``: hit a new species seen ``l`` times."""
        self._check_fitted()
        return np.array([estimate_new_l(self.model_, self.sample_, m, l) for l in range(1, m + 1)])

    def predict_old(self, m: int) -> np.ndarray:
        """Array ``p[l-1]`` for ``l = 1..n+m``: hit an old species seen ``l`` times."""
        self._check_fitted()
        top = self.sample_.n + m
        return np.array([estimate_old_l(self.model_, self.sample_, m, l) for l in range(1, top + 1)])

    def expected_new_species(self, m: int) -> np.ndarray:
        """Posterior mean number of new species represented ``l = 1..m`` times."""
        from .conditional import w_mean

        self._check_fitted()
        return np.array([w_mean(self.model_, self.sample_, m, l) for l in range(1, m + 1)])
