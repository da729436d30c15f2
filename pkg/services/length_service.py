"""
Length Service
==============

Comprimento de emaranhamento ξ_E a partir de uma série (distância n, E_n):
regressão linear de −log E_n contra n na janela final e comparação com um
ajuste de lei de potência em escala log-log.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from config.settings import config
from utils.exceptions import ValidationError


EXPONENTIAL = "exponential"
POLYNOMIAL = "polynomial"
SATURATING = "saturating"


@dataclass(frozen=True)
class LengthSettings:
    slope_threshold: float = config.LENGTH_SLOPE_THRESHOLD
    residual_threshold: float = config.LENGTH_RESIDUAL_THRESHOLD
    saturation_exponent: float = config.LENGTH_SATURATION_EXPONENT
    min_points: int = config.LENGTH_MIN_POINTS


@dataclass(frozen=True)
class LengthFit:
    """Resultado do ajuste: ξ_E (possivelmente infinito) e os dois ajustes."""

    xi_e: float
    slope: float
    intercept: float
    residual: float
    window: Tuple[int, ...]
    decay: str
    power_exponent: float
    power_residual: float

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.xi_e))


def _rms_residual(x: np.ndarray, y: np.ndarray, slope: float, intercept: float) -> float:
    return float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))


def _fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float]:
    if np.ptp(y) == 0:
        return 0.0, float(y[0]), 0.0
    fit = linregress(x, y)
    return float(fit.slope), float(fit.intercept), _rms_residual(x, y, fit.slope, fit.intercept)


def entanglement_length(series: Sequence[Tuple[float, float]],
                        settings: Optional[LengthSettings] = None) -> LengthFit:
    """
    Ajusta ξ_E⁻¹ como a inclinação de −log E_n contra n.

    A janela é a metade final das distâncias (no mínimo 3 pontos). ξ_E é
    finito apenas se a inclinação passar do limiar, o resíduo for aceitável e
    o ajuste exponencial vencer o de lei de potência; caso contrário o
    decaimento é classificado como polinomial ou saturado.

    Args:
        series: Pares (distância n, E_n)
        settings: Limiares (padrão: config)

    Returns:
        LengthFit
    """
    settings = settings or LengthSettings()
    points = sorted((float(n), float(e)) for n, e in series)
    if len(points) < settings.min_points:
        raise ValidationError("series", f"são necessários pelo menos {settings.min_points} pontos")
    size = max(settings.min_points, (len(points) + 1) // 2)
    window = points[-size:]
    distances = np.array([n for n, _ in window])
    values = np.array([e for _, e in window])
    if np.any(values <= 0):
        raise ValidationError("series", "E_n deve ser positivo na janela de ajuste")
    if np.any(distances <= 0):
        raise ValidationError("series", "as distâncias devem ser positivas")

    slope, intercept, residual = _fit(distances, -np.log(values))
    power_slope, _, power_residual = _fit(np.log(distances), np.log(values))

    exponential = (
        slope > settings.slope_threshold
        and residual <= settings.residual_threshold
        and residual <= power_residual
    )
    if exponential:
        xi_e, decay = 1.0 / slope, EXPONENTIAL
    else:
        xi_e = float("inf")
        decay = SATURATING if abs(power_slope) < settings.saturation_exponent else POLYNOMIAL

    return LengthFit(
        xi_e=xi_e,
        slope=slope,
        intercept=intercept,
        residual=residual,
        window=tuple(int(n) for n in distances),
        decay=decay,
        power_exponent=power_slope,
        power_residual=power_residual,
    )


def decay_exponent(series: Sequence[Tuple[float, float]]) -> float:
    """Expoente de uma lei de potência E_n ~ n^a ajustada em toda a série."""
    points = sorted((float(n), float(e)) for n, e in series)
    if len(points) < 2 or any(e <= 0 or n <= 0 for n, e in points):
        raise ValidationError("series", "são necessários 2 pontos positivos")
    distances, values = np.array(points).T
    slope, _, _ = _fit(np.log(distances), np.log(values))
    return slope
