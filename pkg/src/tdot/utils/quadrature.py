"""Singular momentum integrals over the tight-binding band.

Integrals run over p in (0, π) with band energy ε_p = -2h cos p. Integrands are
callables returning an array of shape (P,) or (P, M) for P momenta; every
column may carry its own pole energy.
"""

from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

from tdot.core.exceptions import QuadratureError

Integrand = Callable[[np.ndarray], np.ndarray]
Pole = Tuple[float, int]  # (energy, sign): sign +1 for ε - a - i0, -1 for ε - a + i0

_COINCIDENT = 1e-9


@lru_cache(maxsize=16)
def _legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return roots_legendre(order)


def gauss_legendre_panels(
    breakpoints: Sequence[float], order: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss–Legendre nodes and weights between sorted breakpoints."""
    x, w = _legendre(order)
    edges = np.asarray(breakpoints, dtype=float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (1 + x[None, :])).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


class SingularIntegrator:
    def __init__(
        self,
        h: float,
        panels: int = 32,
        order: int = 64,
        fd_step: float = 1e-5,
    ):
        self.h = h
        self.panels = panels
        self.order = order
        self.fd_step = fd_step * 2 * h

    def energy(self, p: np.ndarray) -> np.ndarray:
        return -2 * self.h * np.cos(p)

    def pole_momentum(self, a: float) -> Optional[float]:
        """Momentum in (0, π) where ε_p = a, or None when a is outside the band."""
        x = -a / (2 * self.h)
        if abs(x) >= 1:
            return None
        return float(np.arccos(x))

    def grid(self, pole_energies: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes with panel breakpoints at every in-band pole momentum."""
        breaks = list(np.linspace(0.0, np.pi, self.panels + 1))
        for a in pole_energies:
            p = self.pole_momentum(a)
            if p is not None:
                breaks.append(p)
        breaks = np.unique(np.round(breaks, 14))
        return gauss_legendre_panels(breaks, self.order)

    def _free_pv(self, a: float) -> float:
        """PV of ∫_0^π dp / (ε_p - a): zero inside the band."""
        if abs(a) < 2 * self.h:
            return 0.0
        return -np.pi * np.sign(a) / np.sqrt(a * a - 4 * self.h**2)

    def _pv_column(
        self,
        values: np.ndarray,
        at_pole: complex,
        a: float,
        nodes: np.ndarray,
        weights: np.ndarray,
    ) -> complex:
        denominator = self.energy(nodes) - a
        if self.pole_momentum(a) is None:
            return complex(np.sum(weights * values / denominator))
        if not np.isfinite(at_pole):
            raise QuadratureError(f"Integrand not finite at the pole a={a}")
        integrand = (values - at_pole) / denominator
        if not np.all(np.isfinite(integrand)):
            raise QuadratureError(f"Residual singularity after subtraction at a={a}")
        return complex(np.sum(weights * integrand) + at_pole * self._free_pv(a))

    def _delta_column(self, at_pole: complex, a: float) -> complex:
        """∫_0^π f(p) δ(ε_p - a) dp."""
        p = self.pole_momentum(a)
        if p is None:
            return 0j
        return at_pole / (2 * self.h * np.sin(p))

    def integrate(
        self,
        f: Integrand,
        poles: Sequence[Sequence[Pole]],
        coefficient: complex = 1.0,
    ) -> np.ndarray:
        """∫_0^π f_j(p) Π_poles 1/(ε_p - a ∓ i0) dp for every column j.

        ``poles[j]`` lists the poles of column j (at most one coincident pair).
        A coincident pair of opposite prescriptions is evaluated as a Hadamard
        finite part; a pair of equal prescriptions as the derivative of the
        single-pole integral.
        """
        terms = [self._partial_fractions(column) for column in poles]

        energies = [a for column in terms for (_, a, _, _) in column]
        nodes, weights = self.grid(energies)
        values = np.asarray(f(nodes))
        if values.ndim == 1:
            values = values[:, None]

        shifts = (0.0, self.fd_step, -self.fd_step)
        on_shell = []
        for column in terms:
            for _, a, _, order in column:
                on_shell.extend(
                    self.pole_momentum(a + s) or 0.0
                    for s in (shifts if order == 2 else shifts[:1])
                )
        on_shell_values = (
            np.asarray(f(np.asarray(on_shell))) if on_shell else np.empty((0, 1))
        )
        if on_shell_values.ndim == 1:
            on_shell_values = on_shell_values[:, None]

        result = np.zeros(len(poles), dtype=complex)
        cursor = 0
        for j, column in enumerate(terms):
            for weight, a, sign, order in column:
                count = 3 if order == 2 else 1
                at = on_shell_values[cursor : cursor + count, j]
                cursor += count
                if order == 1:
                    result[j] += weight * self._single(
                        values[:, j], at[0], a, sign, nodes, weights
                    )
                else:
                    plus = self._single(values[:, j], at[1], a + shifts[1], sign, nodes, weights)
                    minus = self._single(values[:, j], at[2], a + shifts[2], sign, nodes, weights)
                    result[j] += weight * (plus - minus) / (2 * self.fd_step)
        return coefficient * result

    def _single(self, values, at_pole, a, sign, nodes, weights) -> complex:
        pv = self._pv_column(values, at_pole, a, nodes, weights)
        if sign == 0:
            return pv
        return pv + 1j * sign * np.pi * self._delta_column(at_pole, a)

    @staticmethod
    def _partial_fractions(column: Sequence[Pole]) -> List[Tuple[complex, float, int, int]]:
        """Decompose Π 1/(x - a_j) into (weight, a, sign, order) terms.

        Order-2 terms stand for 1/(x - a)^2; their sign is 0 when the two
        factors carry opposite prescriptions.
        """
        groups: List[List] = []
        for a, sign in column:
            for group in groups:
                if abs(group[0] - a) < _COINCIDENT:
                    group[1].append(sign)
                    break
            else:
                groups.append([a, [sign]])

        if any(len(signs) > 2 for _, signs in groups):
            raise QuadratureError("Poles of multiplicity > 2 are not supported")

        terms = []
        for i, (a, signs) in enumerate(groups):
            others = [(b, len(s)) for j, (b, s) in enumerate(groups) if j != i]
            residue = 1.0
            for b, mult in others:
                residue /= (a - b) ** mult
            if len(signs) == 1:
                terms.append((residue, a, signs[0], 1))
            else:
                sign = signs[0] if signs[0] == signs[1] else 0
                slope = residue * sum(-mult / (a - b) for b, mult in others)
                terms.append((residue, a, sign, 2))
                if slope != 0:
                    terms.append((slope, a, sign, 1))
        return terms
