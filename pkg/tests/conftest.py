import numpy as np
from scipy import stats


def chi_square_pvalue(observed, probs) -> float:
    """Goodness-of-fit p-value of observed tallies against exact probabilities.

    Zero-probability categories must be unobserved and are dropped; remaining
    categories with expected count < 5 are merged into one bin to keep the
    chi-square approximation honest.
    """
    observed = np.asarray(observed, dtype=float)
    probs = np.asarray(probs, dtype=float)
    total = observed.sum()
    zero = probs <= 1e-15
    assert not observed[zero].any(), "outcome observed in a zero-probability category"
    observed, probs = observed[~zero], probs[~zero]
    expected = probs * total
    small = expected < 5
    if small.any() and (~small).any():
        observed = np.append(observed[~small], observed[small].sum())
        expected = np.append(expected[~small], expected[small].sum())
    if len(observed) < 2:
        return 1.0
    stat, pvalue = stats.chisquare(observed, expected)
    return float(pvalue)
