"""Input checks shared by the estimators."""

import numpy as np


def check_examples(X, n_positions=None):
    """Coerce X to a 2-D int64 array of attribute ids and sanity-check it.

    Each row is one occurrence; column j holds the attribute id observed at
    window position j. Ids are non-negative and, because every id encodes its
    position, must be distinct within a row.
    """
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError(f"examples must be a 2-D array, got shape {X.shape}")
    if X.size and not np.issubdtype(X.dtype, np.integer):
        raise ValueError(f"attribute ids must be integers, got dtype {X.dtype}")
    X = X.astype(np.int64, copy=False)
    if n_positions is not None and X.shape[1] != n_positions:
        raise ValueError(
            f"expected {n_positions} attribute columns, got {X.shape[1]}"
        )
    if X.size:
        if X.min() < 0:
            raise ValueError("attribute ids must be non-negative")
        srt = np.sort(X, axis=1)
        if (srt[:, 1:] == srt[:, :-1]).any():
            raise ValueError("attribute ids must be distinct within an example")
    return X


def check_labels(y, n_examples=None):
    """Coerce labels to a 1-D int64 array aligned with the example rows."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"labels must be a 1-D array, got shape {y.shape}")
    if y.size and not np.issubdtype(y.dtype, np.integer):
        raise ValueError(f"labels must be integers, got dtype {y.dtype}")
    y = y.astype(np.int64, copy=False)
    if n_examples is not None and len(y) != n_examples:
        raise ValueError(f"got {len(y)} labels for {n_examples} examples")
    return y
