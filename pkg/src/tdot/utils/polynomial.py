from typing import Sequence

import numpy as np


def companion_matrix(coefficients: Sequence[complex]) -> np.ndarray:
    """Frobenius companion matrix of a polynomial given highest degree first."""
    coefficients = np.trim_zeros(np.asarray(coefficients, dtype=complex), "f")
    degree = len(coefficients) - 1
    if degree < 1:
        raise ValueError("polynomial must have degree >= 1")
    monic = coefficients / coefficients[0]
    companion = np.zeros((degree, degree), dtype=complex)
    companion[0, :] = -monic[1:]
    companion[1:, :-1] = np.eye(degree - 1)
    return companion


def polish_roots(
    coefficients: Sequence[complex], roots: np.ndarray, steps: int = 2
) -> np.ndarray:
    """Newton refinement of approximate roots."""
    coefficients = np.asarray(coefficients, dtype=complex)
    derivative = np.polyder(coefficients)
    roots = np.array(roots, dtype=complex)
    for _ in range(steps):
        slope = np.polyval(derivative, roots)
        safe = np.abs(slope) > 0
        roots[safe] -= np.polyval(coefficients, roots[safe]) / slope[safe]
    return roots


def polynomial_roots(coefficients: Sequence[complex], polish_steps: int = 2) -> np.ndarray:
    """All roots as companion-matrix eigenvalues, polished by Newton steps."""
    roots = np.linalg.eigvals(companion_matrix(coefficients))
    return polish_roots(coefficients, roots, polish_steps)


def residual(coefficients: Sequence[complex], roots: np.ndarray) -> np.ndarray:
    """|p(z)| relative to the largest coefficient magnitude."""
    coefficients = np.asarray(coefficients, dtype=complex)
    scale = np.max(np.abs(coefficients))
    return np.abs(np.polyval(coefficients, roots)) / scale
