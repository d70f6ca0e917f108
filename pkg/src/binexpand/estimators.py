"""scikit-learn compatible wrappers.

``BinaryExpansion`` turns [0, 1]-valued features into expansion bits and fits
into pipelines; ``BitCorrelation`` estimates bit statistics from data, in one
pass or incrementally; ``ExpansionSampler`` draws bits from a distribution and
exposes the exact statistics it should reproduce.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .distributions import DistributionModel, parse_model
from .dyadic import check_bit_index, expand_array
from .exact import statistics
from .sampler import BitCounts, check_seed, uniforms, bits_from_uniforms
from .validation import check_bit_matrix, check_unit_array


class BinaryExpansion(TransformerMixin, BaseEstimator):
    """Replace each feature in [0, 1] by the first ``n_bits`` bits of its binary expansion.

    Parameters
    ----------
    n_bits : int, default=8
        Bits kept per feature, between 1 and 52.

    Attributes
    ----------
    n_features_in_ : int

    Examples
    --------
    >>> BinaryExpansion(n_bits=6).fit_transform([[0.72]])
    array([[1, 0, 1, 1, 1, 0]], dtype=uint8)
    """

    def __init__(self, n_bits=8):
        self.n_bits = n_bits

    def fit(self, X, y=None):
        check_bit_index(self.n_bits, "n_bits")
        X = check_unit_array(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_unit_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but BinaryExpansion was fitted "
                f"with {self.n_features_in_}")
        return expand_array(X, self.n_bits).reshape(X.shape[0], -1)

    def inverse_transform(self, B):
        """Truncated values ``sum(b_i 2**-i)`` per feature."""
        check_is_fitted(self, "n_features_in_")
        B = check_bit_matrix(B, n_bits=self.n_features_in_ * self.n_bits)
        weights = 2.0 ** -np.arange(1, self.n_bits + 1)
        return B.reshape(B.shape[0], self.n_features_in_, self.n_bits) @ weights

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_in_")
        if input_features is None:
            input_features = [f"x{k}" for k in range(self.n_features_in_)]
        return np.array([f"{name}_b{i}" for name in input_features
                         for i in range(1, self.n_bits + 1)], dtype=object)


class BitCorrelation(BaseEstimator):
    """Empirical marginals and pairwise correlations of a 0/1 matrix.

    ``partial_fit`` accumulates counts, so a stream of blocks gives the same
    result as one ``fit`` on their concatenation.

    Attributes
    ----------
    marginals_, joint_, covariance_, correlation_ : ndarray
        As in :class:`binexpand.exact.BitStatistics`; undefined
        correlations are ``nan``.
    n_samples_seen_ : int
    """

    def fit(self, X, y=None):
        for attr in ("counts_", "n_features_in_"):
            self.__dict__.pop(attr, None)
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        B = check_bit_matrix(X, n_bits=self.n_features_in_ if hasattr(self, "counts_") else None)
        if not hasattr(self, "counts_"):
            self.counts_ = BitCounts(B.shape[1])
            self.n_features_in_ = B.shape[1]
        self.counts_.update(B)
        self.n_samples_seen_ = self.counts_.rows
        if self.counts_.rows >= 2:
            stats = self.counts_.statistics()
            self.statistics_ = stats
            self.marginals_ = stats.marginals
            self.joint_ = stats.joint
            self.covariance_ = stats.covariance
            self.correlation_ = stats.correlation
        return self


class ExpansionSampler(BaseEstimator):
    """Draw binary-expansion bits from a distribution on [0, 1].

    Parameters
    ----------
    distribution : DistributionModel or str
        A model, or a fragment understood by :func:`binexpand.parse_model`.
    n_bits : int, default=3
    random_state : int, default=0
        Seed of the uniform stream.
    substream : int, default=0

    After ``fit``, ``marginals_`` and ``correlation_`` hold the exact
    statistics of the expansion. Successive ``sample`` calls continue the same
    stream, so two calls of 500 rows equal one call of 1000.
    """

    def __init__(self, distribution="uniform", n_bits=3, random_state=0, substream=0):
        self.distribution = distribution
        self.n_bits = n_bits
        self.random_state = random_state
        self.substream = substream

    def fit(self, X=None, y=None):
        check_bit_index(self.n_bits, "n_bits")
        check_seed(self.random_state, "random_state")
        dist = self.distribution
        self.model_ = dist if isinstance(dist, DistributionModel) else parse_model(dist)
        self.statistics_ = statistics(self.model_, self.n_bits)
        self.marginals_ = self.statistics_.marginals
        self.correlation_ = self.statistics_.correlation
        self.position_ = 0
        return self

    def sample(self, n_samples=1):
        check_is_fitted(self, "model_")
        u = uniforms(self.random_state, n_samples, substream=self.substream,
                     start=self.position_)
        self.position_ += n_samples
        return bits_from_uniforms(self.model_, self.n_bits, u)
