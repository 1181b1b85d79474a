"""Induced margin losses of the elite-driven SVMs and their calibration check."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elite import EliteGuide


def _check_omega(omega):
    if not 0.0 < omega < 1.0:
        raise ValueError(f"omega must lie in (0, 1), got {omega}")


def xi_bar(xi_star, omega: float, variant: str):
    """Unconstrained minimiser of the elite slack penalty g_i."""
    xs = np.asarray(xi_star, dtype=float)
    if variant == "CEDSVM":
        return xs - omega / (2.0 * (1.0 - omega))
    if variant == "LSEDSVM":
        return (1.0 - omega) * xs
    raise ValueError(f"unknown variant {variant!r}")


def induced_loss_cedsvm(u, xi_star, omega: float):
    """g(xi) = w xi + (1-w)(xi - xi*)^2 at xi = max(0, 1-u, xi_bar)."""
    _check_omega(omega)
    u = np.asarray(u, dtype=float)
    xs = np.asarray(xi_star, dtype=float)
    xi = np.maximum(np.maximum(0.0, 1.0 - u), xi_bar(xs, omega, "CEDSVM"))
    return omega * xi + (1.0 - omega) * (xi - xs) ** 2


def induced_loss_lsedsvm(u, xi_star, omega: float):
    """g(xi) = w xi^2 + (1-w)(xi - xi*)^2 at xi = max(0, 1-u, xi_bar)."""
    _check_omega(omega)
    u = np.asarray(u, dtype=float)
    xs = np.asarray(xi_star, dtype=float)
    xi = np.maximum(np.maximum(0.0, 1.0 - u), xi_bar(xs, omega, "LSEDSVM"))
    return omega * xi ** 2 + (1.0 - omega) * (xi - xs) ** 2


def nonelite_loss(u, omega: float, variant: str):
    """w (1-u)_+ for C-EDSVM, w (1-u)_+^2 for LS-EDSVM."""
    h = np.maximum(0.0, 1.0 - np.asarray(u, dtype=float))
    return omega * (h if variant == "CEDSVM" else h * h)


def threshold(omega: float, variant: str) -> float:
    """Largest admissible target slack (strict) for the calibration condition."""
    _check_omega(omega)
    if variant == "CEDSVM":
        return 1.0 + omega / (2.0 * (1.0 - omega))
    if variant == "LSEDSVM":
        return 1.0 / (1.0 - omega)
    raise ValueError(f"unknown variant {variant!r}")


def phi_prime_at_zero(xi_star, omega: float, variant: str):
    """Closed-form derivative of the induced loss at u = 0.

    Where xi_bar >= 1 the loss is flat around 0. At xi_bar = 1 both one-sided
    derivatives vanish, so the value 0 is exact there too.
    """
    _check_omega(omega)
    xs = np.asarray(xi_star, dtype=float)
    xb = xi_bar(xs, omega, variant)
    if variant == "CEDSVM":
        active = -omega + 2.0 * (1.0 - omega) * (xs - 1.0)
    else:
        active = 2.0 * ((1.0 - omega) * xs - 1.0)
    return np.where(xb < 1.0, active, 0.0)


@dataclass(frozen=True)
class CalibrationReport:
    variant: str
    omega: float
    threshold: float
    elite: np.ndarray
    xi_star: np.ndarray
    satisfied: np.ndarray
    phi_prime_at_zero: np.ndarray
    phi_prime_left: np.ndarray
    phi_prime_right: np.ndarray

    @property
    def all_satisfied(self) -> bool:
        return bool(np.all(self.satisfied))

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "omega": float(self.omega),
            "threshold": float(self.threshold),
            "all_satisfied": self.all_satisfied,
            "n_violations": int(np.sum(~self.satisfied)),
            "points": [
                {"index": int(i), "xi_star": float(x), "satisfied": bool(s),
                 "phi_prime_at_zero": float(d), "phi_prime_left": float(lft),
                 "phi_prime_right": float(r)}
                for i, x, s, d, lft, r in zip(self.elite, self.xi_star, self.satisfied,
                                             self.phi_prime_at_zero, self.phi_prime_left,
                                             self.phi_prime_right)
            ],
        }


def check_calibration(guide: EliteGuide, omega: float, variant: str) -> CalibrationReport:
    """Per elite point, test xi* < threshold and report phi'(0)."""
    thr = threshold(omega, variant)
    xs = guide.targets
    d = phi_prime_at_zero(xs, omega, variant)
    # the loss is C^1 at u = 0 in every regime, so the one-sided derivatives coincide
    return CalibrationReport(variant, float(omega), thr, guide.elite.copy(), xs.copy(),
                             xs < thr, d, d.copy(), d.copy())
