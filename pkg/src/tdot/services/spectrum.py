import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tdot.core.config import RunConfig
from tdot.core.exceptions import InvariantViolationError, NumericalError
from tdot.core.logging import LoggerFactory
from tdot.domain.interfaces import TransmissionMethod
from tdot.domain.models import ResonanceRecord, SpectrumRow
from tdot.infrastructure.methods.factory import MethodFactory
from tdot.services.floquet import FloquetSolver
from tdot.domain.value_objects import BoundLabel, ContinuumLabel
from tdot.services.gpp import GppEngine
from tdot.services.model import static_scattering
from tdot.services.resonance import ResonanceAnalyzer
from tdot.utils.quadrature import SingularIntegrator

UNITARITY_TOLERANCE = 1e-5
STATIC_UNITARITY_TOLERANCE = 1e-12
RESONANCE_WINDOW = 0.05
SELF_CHECK_POINTS = 25
NO_RESONANCES = "no quantum resonances; the transmission follows the static result"


class SpectrumRunner:
    """Runs per-momentum work on a bounded pool and keeps results in k order."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.logger = LoggerFactory.create_logger("SpectrumRunner")

    def momenta(self, points: Optional[int] = None) -> np.ndarray:
        s = self.config.sweep
        return np.linspace(s.k_min, s.k_max, points or s.k_points)

    async def _sweep(
        self, method: TransmissionMethod, momenta: Sequence[float]
    ) -> List[SpectrumRow]:
        workers = self.config.workers
        semaphore = asyncio.Semaphore(workers)
        loop = asyncio.get_running_loop()

        with ThreadPoolExecutor(max_workers=workers) as pool:

            async def evaluate(k: float) -> SpectrumRow:
                async with semaphore:
                    try:
                        return await loop.run_in_executor(pool, method.transmission, k)
                    except NumericalError as e:
                        self.logger.error(f"{method.name} failed at k={k}: {e}")
                        raise type(e)(f"k={k}: {e.message}", e.error_code) from e

            return await asyncio.gather(*(evaluate(float(k)) for k in momenta))

    def sweep(
        self, method: TransmissionMethod, momenta: Optional[Sequence[float]] = None
    ) -> List[SpectrumRow]:
        momenta = self.momenta() if momenta is None else momenta
        self.logger.info(
            f"Sweeping {method.name} over {len(momenta)} momenta "
            f"with {self.config.workers} workers"
        )
        return asyncio.run(self._sweep(method, momenta))

    def run_spectrum(self, method_name: Optional[str] = None) -> List[SpectrumRow]:
        if self.config.self_check:
            self.self_check()
        name = method_name or self.config.sweep.method
        method = MethodFactory.create_method(name, self.config)
        return self.sweep(method)

    def run_oracle(self) -> List[SpectrumRow]:
        return self.run_spectrum("oracle")

    def _gpp_engine(self) -> GppEngine:
        g = self.config.gpp
        integrator = SingularIntegrator(
            self.config.model.h, panels=g.quad_panels, order=g.quad_order
        )
        return GppEngine(
            self.config.model,
            nu_max=g.nu_max,
            time_samples=g.time_samples,
            integrator=integrator,
        )

    def _analyzer(self) -> ResonanceAnalyzer:
        r = self.config.resonance
        return ResonanceAnalyzer(
            self._gpp_engine(),
            nu_range=(r.scan_nu_min, r.scan_nu_max),
            k_points=r.scan_points,
            threshold=r.strong_threshold,
        )

    def run_resonances(self) -> Tuple[List[ResonanceRecord], str]:
        analyzer = self._analyzer()
        records = analyzer.find_resonances()
        if not records:
            return records, NO_RESONANCES
        counts = analyzer.summary(records)
        note = (
            f"{counts['total']} resonances: "
            f"{counts['strong']} strong, {counts['weak']} weak"
        )
        return records, note

    def run_flips(self) -> List[Dict[str, Any]]:
        """|B_bk(ν)|² per bound state at the configured momentum."""
        k = self.config.resonance.flip_k
        basis = self._gpp_engine().basis
        rows = []
        for b in (1, 2):
            spectrum = basis.fourier_flips(BoundLabel(b), ContinuumLabel(k))
            probabilities = spectrum.probabilities()
            for j, nu in enumerate(spectrum.harmonics):
                coefficient = spectrum.coefficients[j]
                rows.append(
                    {
                        "b": b,
                        "k": k,
                        "nu": int(nu),
                        "B_real": float(coefficient.real),
                        "B_imag": float(coefficient.imag),
                        "probability": float(probabilities[j]),
                    }
                )
        self.logger.info(f"Flip spectra at k={k} for both bound states")
        return rows

    def resonance_windows(self) -> List[float]:
        """Bare resonance momenta; dressed positions differ at second order in g1."""
        if self.config.model.is_static:
            return []
        return [k for _, _, k in self._analyzer().bare_positions()]

    def run_compare(self) -> List[Dict[str, Any]]:
        momenta = self.momenta()
        rows = {
            name: self.sweep(MethodFactory.create_method(name, self.config), momenta)
            for name in ("static", "floquet", "gpp")
        }
        windows = self.resonance_windows()
        report = [
            deviation("floquet", "static", rows["floquet"], rows["static"], windows),
            deviation("floquet", "gpp", rows["floquet"], rows["gpp"], windows),
        ]

        if self.config.oracle.oracle_enabled:
            subset = self.momenta(self.config.oracle.oracle_points)
            oracle = self.sweep(MethodFactory.create_method("oracle", self.config), subset)
            floquet = self.sweep(MethodFactory.create_method("floquet", self.config), subset)
            report.append(deviation("floquet", "oracle", floquet, oracle, windows))

        for entry in report:
            self.logger.info(f"Deviation report: {entry}")
        return report

    def self_check(self) -> None:
        """Static and Floquet unitarity on a coarse grid; raises on violation."""
        p = self.config.model
        solver = FloquetSolver(p, n_modes=self.config.floquet.n_modes)
        for k in self.momenta(SELF_CHECK_POINTS):
            k = float(k)
            static = static_scattering(k, p.g0, p)
            if abs(static.transmission + static.reflection - 1) > STATIC_UNITARITY_TOLERANCE:
                raise InvariantViolationError(
                    f"Static unitarity violated at k={k}", error_code="static_unitarity"
                )
            solution = solver.solve(k)
            if abs(solution.current_sum - 1) > UNITARITY_TOLERANCE:
                raise InvariantViolationError(
                    f"Floquet current sum {solution.current_sum:.8f} at k={k}",
                    error_code="unitarity",
                )
        self.logger.info("Self-check passed")


def deviation(
    first: str,
    second: str,
    rows_a: List[SpectrumRow],
    rows_b: List[SpectrumRow],
    windows: Sequence[float],
    width: float = RESONANCE_WINDOW,
) -> Dict[str, Any]:
    """Max/mean |ΔT_total| overall, off the resonance windows and inside them."""
    k = np.array([row.k for row in rows_a])
    delta = np.abs(
        np.array([row.T_total for row in rows_a]) - np.array([row.T_total for row in rows_b])
    )
    inside = np.zeros(len(k), dtype=bool)
    for centre in windows:
        inside |= np.abs(k - centre) <= width

    def stats(mask: np.ndarray) -> Tuple[Optional[float], Optional[float]]:
        if not mask.any():
            return None, None
        return float(delta[mask].max()), float(delta[mask].mean())

    max_all, mean_all = stats(np.ones(len(k), dtype=bool))
    max_off, mean_off = stats(~inside)
    max_in, mean_in = stats(inside)
    return {
        "pair": f"{first}-{second}",
        "points": int(len(k)),
        "max_abs": max_all,
        "mean_abs": mean_all,
        "max_abs_off_resonance": max_off,
        "mean_abs_off_resonance": mean_off,
        "max_abs_in_windows": max_in,
        "mean_abs_in_windows": mean_in,
    }
