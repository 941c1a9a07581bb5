import numpy as np
from scipy.linalg import LinAlgError, solve, solve_banded

from tdot.core.exceptions import SingularMatrixError


def pentadiagonal_to_banded(
    a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray, e: np.ndarray
) -> np.ndarray:
    """Pack the rows a_n x_{n-2} + b_n x_{n-1} + c_n x_n + d_n x_{n+1} + e_n x_{n+2}
    into the (5, N) upper-first layout used by ``solve_banded((2, 2), ...)``.

    Couplings that fall outside the matrix are dropped.
    """
    size = len(c)
    ab = np.zeros((5, size), dtype=complex)
    ab[0, 2:] = e[:-2]
    ab[1, 1:] = d[:-1]
    ab[2, :] = c
    ab[3, :-1] = b[1:]
    ab[4, :-2] = a[2:]
    return ab


def banded_to_dense(ab: np.ndarray) -> np.ndarray:
    size = ab.shape[1]
    dense = np.zeros((size, size), dtype=ab.dtype)
    for offset in range(-2, 3):
        row = 2 - offset
        if offset >= 0:
            dense += np.diag(ab[row, offset:], offset)
        else:
            dense += np.diag(ab[row, :offset], offset)
    return dense


def solve_pentadiagonal(
    ab: np.ndarray, rhs: np.ndarray, dense: bool = False
) -> np.ndarray:
    """Solve a complex pentadiagonal system by banded LU with partial pivoting.

    ``dense=True`` solves the same system with a full LU factorization.
    """
    try:
        if dense:
            solution = solve(banded_to_dense(ab), rhs)
        else:
            solution = solve_banded((2, 2), ab, rhs)
    except (LinAlgError, ValueError) as e:
        raise SingularMatrixError(f"Pentadiagonal system is singular: {e}")

    if not np.all(np.isfinite(solution)):
        raise SingularMatrixError("Pentadiagonal solve produced non-finite values")
    return solution
