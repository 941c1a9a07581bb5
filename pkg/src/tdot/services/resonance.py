from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from tdot.core.logging import LoggerFactory
from tdot.domain.models import Classification, ModelParams, ResonanceRecord
from tdot.services.gpp import GppEngine
from tdot.services.model import dispersion

# Bare levels further than this outside the band cannot be pulled in by δε.
SCAN_MARGIN = 0.5
RESIDUAL_TOLERANCE = 1e-8
# Roots needing |Re δε| above this fraction of ω are not second-order shifts.
PERTURBATIVE_SHIFT = 0.5


class ResonanceAnalyzer:
    """Locates k_in with ε_k = ε_b - νω - Re δε_{b,k}(ν) and characterizes them."""

    def __init__(
        self,
        engine: GppEngine,
        nu_range: Tuple[int, int] = (-4, 4),
        k_points: int = 2000,
        k_margin: float = 0.05,
        tolerance: float = 1e-10,
        threshold: float = 0.9,
    ):
        self.engine = engine
        self.params: ModelParams = engine.params
        self.nu_range = nu_range
        self.k_grid = np.linspace(k_margin, np.pi - k_margin, k_points)
        self.tolerance = tolerance
        self.threshold = threshold
        self.logger = LoggerFactory.create_logger("ResonanceAnalyzer")

    def residual(self, b: int, nu: int, k: float) -> float:
        shift = self.engine.corrections(b, k, [nu])[0].real
        return self._residual(b, nu, k, shift)

    def _residual(self, b: int, nu: int, k: float, shift: float) -> float:
        eps_b = self.engine.mean_energies[b - 1]
        return float(dispersion(k, self.params) - (eps_b - nu * self.params.omega - shift))

    def candidates(self, b: int) -> List[int]:
        eps_b = self.engine.mean_energies[b - 1]
        edge = 2 * self.params.h + SCAN_MARGIN
        lo, hi = self.nu_range
        return [
            nu
            for nu in range(lo, hi + 1)
            if abs(eps_b - nu * self.params.omega) <= edge
        ]

    def bare_positions(self) -> List[Tuple[int, int, float]]:
        """(b, ν, k) solving ε_k = ε_b - νω without the energy correction."""
        positions = []
        lo, hi = self.nu_range
        for b in (1, 2):
            eps_b = self.engine.mean_energies[b - 1]
            for nu in range(lo, hi + 1):
                x = -(eps_b - nu * self.params.omega) / (2 * self.params.h)
                if abs(x) < 1:
                    positions.append((b, nu, float(np.arccos(x))))
        return positions

    def bare_momentum(self, b: int, nu: int) -> float:
        """Bare crossing of (b, ν), clipped to the nearer band edge."""
        eps_b = self.engine.mean_energies[b - 1]
        x = -(eps_b - nu * self.params.omega) / (2 * self.params.h)
        return float(np.arccos(np.clip(x, -1.0, 1.0)))

    def connected_root(
        self, b: int, nu: int, roots: Sequence[Tuple[float, float, float]]
    ) -> Optional[Tuple[float, float, float]]:
        """The (k, Re δε, residual) root continuously connected to the bare crossing.

        Roots whose shift is not small against ω come from δε growing near a
        band edge, not from the dressed bound level, and are dropped.
        """
        bound = PERTURBATIVE_SHIFT * self.params.omega
        perturbative = [root for root in roots if abs(root[1]) <= bound]
        for k_res, shift, _ in roots:
            if abs(shift) > bound:
                self.logger.debug(
                    f"Dropping root b={b}, nu={nu} at k={k_res:.4f}: Re δε={shift:.3f}"
                )
        if not perturbative:
            return None
        bare = self.bare_momentum(b, nu)
        return min(perturbative, key=lambda root: abs(root[0] - bare))

    def find_resonances(self) -> List[ResonanceRecord]:
        if self.params.is_static:
            self.logger.info("Static coupling: no quantum resonances")
            return []

        records = []
        for b in (1, 2):
            nus = self.candidates(b)
            if not nus:
                continue
            residuals = self._scan(b, nus)
            for j, nu in enumerate(nus):
                signs = np.sign(residuals[:, j])
                roots = []
                for i in np.where(signs[:-1] * signs[1:] < 0)[0]:
                    k_res = self._bisect(b, nu, self.k_grid[i], self.k_grid[i + 1])
                    shift = self.engine.corrections(b, k_res, [nu])[0].real
                    remaining = abs(self._residual(b, nu, k_res, shift))
                    if remaining > RESIDUAL_TOLERANCE:
                        # sign change across a pole of the bound-bound denominator
                        continue
                    roots.append((k_res, shift, remaining))
                chosen = self.connected_root(b, nu, roots)
                if chosen is not None:
                    records.append(self._record(b, nu, chosen[0], chosen[2]))

        records.sort(key=lambda r: r.k_res)
        self.logger.info(
            f"Found {len(records)} resonances: "
            f"{[(r.b, r.nu, round(r.k_res, 4)) for r in records]}"
        )
        return records

    def _scan(self, b: int, nus: Sequence[int]) -> np.ndarray:
        table = np.empty((len(self.k_grid), len(nus)))
        for i, k in enumerate(self.k_grid):
            shifts = self.engine.corrections(b, k, nus).real
            for j, nu in enumerate(nus):
                table[i, j] = self._residual(b, nu, k, shifts[j])
        return table

    def _bisect(self, b: int, nu: int, lo: float, hi: float) -> float:
        f_lo = self.residual(b, nu, lo)
        while hi - lo > self.tolerance:
            mid = 0.5 * (lo + hi)
            f_mid = self.residual(b, nu, mid)
            if np.sign(f_mid) == np.sign(f_lo):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _record(self, b: int, nu: int, k_res: float, residual: float) -> ResonanceRecord:
        p = self.params
        correction = self.engine.energy_correction(b, k_res, nu)
        linewidth = correction.linewidth
        ratio = self.strength_ratio(b, nu, k_res)
        return ResonanceRecord(
            b=b,
            nu=nu,
            k_res=k_res,
            energy=float(dispersion(k_res, p)),
            linewidth=linewidth,
            lifetime=1 / linewidth if linewidth > 0 else float("inf"),
            strength_ratio=ratio,
            classification=self._classify_ratio(ratio),
            residual=residual,
            k_width=linewidth / (2 * p.h * np.sin(k_res)),
            threshold=self.threshold,
        )

    def strength_ratio(self, b: int, nu: int, k: float) -> float:
        """|c_bk(ν)|² / |c_bk(±1)|² with the sign of ν."""
        coefficients = self.engine.bound_coefficients(b, k)
        reference = 1 if nu >= 0 else -1
        dominant = abs(self.engine.harmonic(coefficients, reference)) ** 2
        if dominant == 0:
            return 0.0
        return float(abs(self.engine.harmonic(coefficients, nu)) ** 2 / dominant)

    def _classify_ratio(self, ratio: float) -> Classification:
        return Classification.STRONG if ratio >= self.threshold else Classification.WEAK

    def classify(self, record: ResonanceRecord) -> Classification:
        return self._classify_ratio(self.strength_ratio(record.b, record.nu, record.k_res))

    def resonant_amplitude(self, record: ResonanceRecord) -> complex:
        """A = 2π |c_bk(ν)|² / (ε_b - ε_k - νω - δε); adds i A/(2h sin k) to τ_el."""
        p = self.params
        coefficients = self.engine.bound_coefficients(record.b, record.k_res)
        coefficient = self.engine.harmonic(coefficients, record.nu)
        correction = self.engine.energy_correction(record.b, record.k_res, record.nu).value
        eps_b = self.engine.mean_energies[record.b - 1]
        denominator = eps_b - dispersion(record.k_res, p) - record.nu * p.omega - correction
        return complex(2 * np.pi * abs(coefficient) ** 2 / denominator)

    def elastic_shift(self, record: ResonanceRecord) -> complex:
        """Contribution i A / (2h sin k_res) of the resonant term to τ_el."""
        amplitude = self.resonant_amplitude(record)
        return 1j * amplitude / (2 * self.params.h * np.sin(record.k_res))

    def spacing_consistent(
        self, records: Sequence[ResonanceRecord], tolerance: float = 0.05
    ) -> bool:
        """Records sharing a bound state sit at energies an integer number of ω apart;
        records whose energies are not integer-spaced must belong to different b."""
        for first, second in combinations(records, 2):
            spacing = abs(first.energy - second.energy) / self.params.omega
            integer = abs(spacing - round(spacing)) < tolerance
            if first.b == second.b and not integer:
                return False
        return True

    def summary(self, records: Sequence[ResonanceRecord]) -> Dict[str, int]:
        strong = sum(r.classification is Classification.STRONG for r in records)
        return {"total": len(records), "strong": strong, "weak": len(records) - strong}
