import numpy as np
import pytest
from scipy.integrate import quad

from ntle.dist import NtleParams, pdf, quantile

# the evaluation grid used by the cross-checks: 3 rates x 4 shapes x 5 weights
GRID = [
    NtleParams(lam, beta, delta)
    for lam in (0.5, 1.0, 2.0)
    for beta in (0.5, 1.0, 1.5, 3.0)
    for delta in (-0.9, -0.5, 0.0, 0.5, 0.9)
]


@pytest.fixture(scope="session")
def param_grid():
    return GRID


def y_space_quad(f, p: NtleParams, lower: float = 0.0) -> float:
    """Independent oracle: integrate f over (lower, inf) in y, splitting at
    the median so the endpoint singularity and the tail are handled by
    separate adaptive passes."""
    mid = max(quantile(p, 0.5), lower * 1.5 + 1e-6)
    if mid <= lower:
        return quad(f, lower, np.inf, limit=300)[0]
    a = quad(f, lower, mid, limit=300)[0]
    b = quad(f, mid, np.inf, limit=300)[0]
    return a + b


def pdf_power_integral(p: NtleParams, power: float) -> float:
    """Oracle for int g(y)**power dy by direct y-space quadrature."""
    return y_space_quad(lambda y: pdf(p, y) ** power, p)
