"""Input validation for array-valued entry points."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DomainError


def check_unit_array(X, *, name="X"):
    """2-D float64 array with every entry in [0, 1]."""
    X = check_array(X, dtype=np.float64, input_name=name)
    if np.any((X < 0.0) | (X > 1.0)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return X


def check_bit_matrix(B, *, n_bits=None, name="bits"):
    """2-D uint8 array of zeros and ones."""
    B = check_array(B, dtype=None, input_name=name)
    if not np.all((B == 0) | (B == 1)):
        raise DomainError(f"{name} must contain only 0 and 1")
    if n_bits is not None and B.shape[1] != n_bits:
        raise DomainError(f"{name} has {B.shape[1]} columns, expected {n_bits}")
    return B.astype(np.uint8, copy=False)
