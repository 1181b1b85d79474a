"""Dual QP container and solvers.

All model variants reduce to

    max  -1/2 a'Ha + sum_i rho_i(a_i) + D   s.t.  y'a = 0,  lower <= a <= upper

with rho_i(a) = R_i a - d_i a^2 / 2 for a >= tau_i, continued by its tangent line
below tau_i. tau = -inf everywhere gives the plain quadratic -1/2 a'(H + diag d)a + R'a.
A finite tau_i arises in the C-EDSVM elite block, where the multiplier of xi_i >= 0
has been maximised out in closed form.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numba
import numpy as np

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Infeasible problem data or a solver that could not make progress."""


@dataclass(frozen=True)
class DualQP:
    H: np.ndarray
    d: np.ndarray
    R: np.ndarray
    D: float
    y: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    tau: np.ndarray = field(default=None)

    def __post_init__(self):
        n = len(self.y)
        arr = lambda v: np.ascontiguousarray(np.asarray(v, dtype=float).reshape(-1))
        H = np.ascontiguousarray(np.asarray(self.H, dtype=float))
        if H.shape != (n, n):
            raise ValueError(f"H has shape {H.shape}, expected {(n, n)}")
        object.__setattr__(self, "H", H)
        for name in ("d", "R", "y", "lower", "upper"):
            v = arr(getattr(self, name))
            if v.shape != (n,):
                raise ValueError(f"{name} must have length {n}")
            object.__setattr__(self, name, v)
        tau = np.full(n, -np.inf) if self.tau is None else arr(self.tau)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "D", float(self.D))
        if not np.all(np.abs(self.y) == 1.0):
            raise ValueError("y must be +-1")
        if np.any(self.lower > self.upper):
            raise SolverError("lower bound exceeds upper bound")
        if not np.all(np.isfinite(self.lower)):
            raise ValueError("lower bounds must be finite")
        if np.any(np.isinf(self.upper) & (np.diag(H) + self.d <= 0)):
            raise ValueError("unbounded coordinate without positive curvature")

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def Q(self) -> np.ndarray:
        return self.H + np.diag(self.d)

    def rho_grad(self, alpha) -> np.ndarray:
        return self.R - self.d * np.maximum(alpha, self.tau)

    def gradient(self, alpha) -> np.ndarray:
        alpha = np.asarray(alpha, dtype=float)
        return -self.H @ alpha + self.rho_grad(alpha)

    def objective(self, alpha) -> float:
        a = np.asarray(alpha, dtype=float)
        t = np.maximum(a, self.tau)
        rho = self.R * t - 0.5 * self.d * t * t
        below = a < self.tau
        if np.any(below):
            slope = self.R - self.d * t
            rho = np.where(below, rho + slope * (a - t), rho)
        return float(-0.5 * a @ self.H @ a + rho.sum() + self.D)


@dataclass
class QPSolution:
    alpha: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool = True


def _violation_sets(qp: DualQP, alpha):
    y, lo, up = qp.y, qp.lower, qp.upper
    below_up = alpha < up
    above_lo = alpha > lo
    i_up = np.where(y > 0, below_up, above_lo)
    i_low = np.where(y > 0, above_lo, below_up)
    return i_up, i_low


def kkt_report(qp: DualQP, alpha) -> float:
    """Maximal violating-pair gap max_{I_up} y_i g_i - min_{I_low} y_j g_j (clamped at 0)."""
    alpha = np.asarray(alpha, dtype=float)
    scale = 1.0 + np.max(np.abs(alpha), initial=0.0)
    if (np.any(alpha < qp.lower - 1e-9 * scale) or np.any(alpha > qp.upper + 1e-9 * scale)
            or abs(qp.y @ alpha) > 1e-8 * scale):
        raise SolverError("alpha is infeasible")
    yg = qp.y * qp.gradient(alpha)
    i_up, i_low = _violation_sets(qp, alpha)
    if not (np.any(i_up) and np.any(i_low)):
        return 0.0
    return max(0.0, float(yg[i_up].max() - yg[i_low].min()))


@numba.njit(cache=True)
def _fprime(t, ai, aj, yi, yj, Ri, Rj, di, dj, ti, tj, base, eta):
    gi = Ri - di * max(ai + yi * t, ti)
    gj = Rj - dj * max(aj - yj * t, tj)
    return yi * gi - yj * gj - base - eta * t


@numba.njit(cache=True)
def _smo_core(H, d, R, tau, y, lo, up, alpha, tol, max_iter):
    n = alpha.shape[0]
    ha = H @ alpha
    it = 0
    gap = np.inf
    status = 1  # 0 converged, 1 max_iter, 2 unbounded step
    while it < max_iter:
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for k in range(n):
            g = R[k] - d[k] * max(alpha[k], tau[k]) - ha[k]
            yg = y[k] * g
            if y[k] > 0:
                up_ok = alpha[k] < up[k]
                low_ok = alpha[k] > lo[k]
            else:
                up_ok = alpha[k] > lo[k]
                low_ok = alpha[k] < up[k]
            if up_ok and yg > gmax:
                gmax = yg
                i = k
            if low_ok and yg < gmin:
                gmin = yg
                j = k
        gap = gmax - gmin
        if i < 0 or j < 0 or gap <= tol:
            status = 0
            break
        # second-order choice of j: largest predicted gain (gmax - yg_j)^2 / curvature
        ci = d[i] if alpha[i] > tau[i] else 0.0
        best = -1.0
        for k in range(n):
            if y[k] > 0:
                low_ok = alpha[k] > lo[k]
            else:
                low_ok = alpha[k] < up[k]
            if not low_ok:
                continue
            yg = y[k] * (R[k] - d[k] * max(alpha[k], tau[k]) - ha[k])
            b = gmax - yg
            if b <= 0.0:
                continue
            ck = d[k] if alpha[k] > tau[k] else 0.0
            a = H[i, i] + H[k, k] - 2.0 * y[i] * y[k] * H[i, k] + ci + ck
            if a <= 1e-12:
                a = 1e-12
            gain = b * b / a
            if gain > best:
                best = gain
                j = k
        yi = y[i]
        yj = y[j]
        ai = alpha[i]
        aj = alpha[j]
        # feasible step lengths along a_i += y_i t, a_j -= y_j t
        lim_i = up[i] - ai if yi > 0 else ai - lo[i]
        lim_j = aj - lo[j] if yj > 0 else up[j] - aj
        t_hi = min(lim_i, lim_j)
        eta = H[i, i] + H[j, j] - 2.0 * yi * yj * H[i, j]
        if eta < 0.0:
            eta = 0.0
        base = yi * ha[i] - yj * ha[j]
        # kinks where a coordinate crosses its tau
        b1 = np.inf
        b2 = np.inf
        if np.isfinite(tau[i]):
            b = yi * (tau[i] - ai)
            if b > 0.0 and b < t_hi:
                b1 = b
        if np.isfinite(tau[j]):
            b = yj * (aj - tau[j])
            if b > 0.0 and b < t_hi:
                b2 = b
        if b2 < b1:
            b1, b2 = b2, b1
        s = 0.0
        fs = _fprime(0.0, ai, aj, yi, yj, R[i], R[j], d[i], d[j], tau[i], tau[j], base, eta)
        t = -1.0
        for seg in range(3):
            if seg == 0:
                e = b1
            elif seg == 1:
                e = b2
            else:
                e = t_hi
            if seg < 2 and not (e < t_hi):
                continue
            mid = s + 1.0 if not np.isfinite(e) else 0.5 * (s + e)
            slope = -eta
            if ai + yi * mid > tau[i]:
                slope -= d[i]
            if aj - yj * mid > tau[j]:
                slope -= d[j]
            if slope < 0.0:
                root = s + fs / (-slope)
                if root <= e:
                    t = root
                    break
            if not np.isfinite(e):
                break
            s = e
            fs = _fprime(e, ai, aj, yi, yj, R[i], R[j], d[i], d[j], tau[i], tau[j], base, eta)
            if fs <= 0.0 or seg == 2:
                t = e
                break
        if t < 0.0 or not np.isfinite(t):
            status = 2
            break
        new_i = ai + yi * t
        new_j = aj - yj * t
        if t >= lim_i:
            new_i = up[i] if yi > 0 else lo[i]
        if t >= lim_j:
            new_j = lo[j] if yj > 0 else up[j]
        di_ = new_i - ai
        dj_ = new_j - aj
        alpha[i] = new_i
        alpha[j] = new_j
        for k in range(n):
            ha[k] += H[i, k] * di_ + H[j, k] * dj_
        it += 1
    return alpha, it, status, gap


def feasible_start(qp: DualQP) -> np.ndarray:
    """Projection of the origin onto the feasible set (the origin itself when lower = 0)."""
    return project_feasible(np.zeros(qp.n), qp.y, qp.lower, qp.upper)


def solve_smo(qp: DualQP, tol: float = 1e-6, max_iter: int = 10_000_000,
              alpha0=None) -> QPSolution:
    """Generalized SMO.

    The first index is the maximal violator, the second is picked by the
    second-order gain rule; iteration stops once the maximal violating-pair gap
    is at most ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    alpha = feasible_start(qp) if alpha0 is None else np.array(alpha0, dtype=float)
    alpha, iters, status, gap = _smo_core(qp.H, qp.d, qp.R, qp.tau, qp.y, qp.lower,
                                          qp.upper, alpha, float(tol), int(max_iter))
    if status == 2:
        raise SolverError("unbounded two-variable step; check curvature of unbounded coordinates")
    converged = status == 0
    if not converged:
        log.warning("SMO hit max_iter=%d with violation %.3g", max_iter, gap)
    return QPSolution(alpha, qp.objective(alpha), kkt_report(qp, alpha), int(iters), converged)


def project_feasible(v, y, lower, upper) -> np.ndarray:
    """Euclidean projection onto {a : y'a = 0, lower <= a <= upper}.

    The projection is clip(v - nu*y, lower, upper) for the nu solving y'a(nu) = 0;
    y'a(nu) is piecewise linear and nonincreasing in nu, so nu is located exactly
    between sorted breakpoints.
    """
    v = np.asarray(v, dtype=float)
    if np.sum(np.where(y > 0, lower, -upper)) > 0 or np.sum(np.where(y > 0, upper, -lower)) < 0:
        raise SolverError("equality constraint incompatible with bounds")

    def s(nu):
        return y @ np.clip(v - nu * y, lower, upper)

    bps = np.concatenate([y * (v - lower), y * (v - upper)])
    bps = np.unique(bps[np.isfinite(bps)])
    if bps.size == 0:
        return np.clip(v, lower, upper)
    a = np.clip(v[None, :] - bps[:, None] * y[None, :], lower, upper)
    vals = a @ y
    if vals[0] < 0:
        # every breakpoint already too large: root lies left of the first one
        lo_nu, hi_nu = bps[0] - 1.0, bps[0]
        while s(lo_nu) < 0:
            lo_nu = bps[0] - 2.0 * (bps[0] - lo_nu)
    elif vals[-1] > 0:
        lo_nu, hi_nu = bps[-1], bps[-1] + 1.0
        while s(hi_nu) > 0:
            hi_nu = bps[-1] + 2.0 * (hi_nu - bps[-1])
    else:
        k = int(np.argmax(vals <= 0))
        if vals[k] == 0 or k == 0:
            return a[k]
        lo_nu, hi_nu = bps[k - 1], bps[k]
    s_lo, s_hi = s(lo_nu), s(hi_nu)
    nu = lo_nu if s_lo == s_hi else lo_nu + s_lo * (hi_nu - lo_nu) / (s_lo - s_hi)
    return np.clip(v - nu * y, lower, upper)


def solve_reference(qp: DualQP, tol: float = 1e-13, max_iter: int = 200_000) -> QPSolution:
    """Dense oracle: accelerated projected-gradient ascent with exact projection.

    After the ascent stalls, free coordinates are polished by solving the
    equality-constrained stationarity system restricted to them; the polish is kept
    only if it stays feasible and does not lower the objective.
    """
    n = qp.n
    if n > 200:
        raise ValueError("reference solver is limited to n <= 200")
    L = np.linalg.eigvalsh(qp.H)[-1] + np.max(qp.d, initial=0.0)
    step = 1.0 / max(L, 1e-12)
    proj = lambda v: project_feasible(v, qp.y, qp.lower, qp.upper)
    x = feasible_start(qp)
    z = x.copy()
    tk = 1.0
    f_old = qp.objective(x)
    it = 0
    for it in range(1, max_iter + 1):
        x_new = proj(z + step * qp.gradient(z))
        f_new = qp.objective(x_new)
        if f_new < f_old:
            # adaptive restart keeps the sequence monotone
            z = x.copy()
            tk = 1.0
            x_new = proj(x + step * qp.gradient(x))
            f_new = qp.objective(x_new)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        z = x_new + ((tk - 1.0) / t_next) * (x_new - x)
        moved = np.max(np.abs(x_new - x), initial=0.0)
        x, tk = x_new, t_next
        done = abs(f_new - f_old) < tol * (1.0 + abs(f_new)) and moved * L < 1e-9
        f_old = f_new
        if done:
            break
    x = _polish(qp, x)
    converged = it < max_iter
    if not converged:
        raise SolverError(f"reference solver did not converge in {max_iter} iterations")
    return QPSolution(x, qp.objective(x), kkt_report(qp, x), it, converged)


def _polish(qp: DualQP, x, rounds: int = 5) -> np.ndarray:
    scale = 1.0 + np.max(np.abs(x), initial=0.0)
    for _ in range(rounds):
        free = (x > qp.lower + 1e-9 * scale) & (x < qp.upper - 1e-9 * scale)
        F = np.flatnonzero(free)
        if F.size == 0:
            return x
        quad = x[F] >= qp.tau[F]
        Hff = qp.H[np.ix_(F, F)] + np.diag(np.where(quad, qp.d[F], 0.0))
        # constant part of the gradient on F after fixing the bound coordinates
        c = qp.gradient(x)[F] + Hff @ x[F]
        yF = qp.y[F]
        rhs_eq = -(qp.y[~free] @ x[~free])
        K = np.block([[Hff, yF[:, None]], [yF[None, :], np.zeros((1, 1))]])
        sol = np.linalg.lstsq(K, np.concatenate([c, [rhs_eq]]), rcond=None)[0]
        cand = x.copy()
        cand[F] = sol[:-1]
        if (np.any(cand < qp.lower) or np.any(cand > qp.upper)
                or np.any((cand[F] >= qp.tau[F]) != quad)):
            return x
        if qp.objective(cand) < qp.objective(x) - 1e-15 * (1 + abs(qp.objective(x))):
            return x
        if np.max(np.abs(cand - x)) < 1e-15 * scale:
            return cand
        x = cand
    return x


def recover_intercept(qp: DualQP, alpha, free_tol: float = 1e-6, gap_tol: float = 1e-6) -> float:
    """Intercept from the KKT conditions of a converged dual solution.

    At optimality y_i g_i = beta0 for every free coordinate, where g is the dual
    gradient (this encodes y_i f(x_i) = 1 - xi_i with the variant's xi_i(alpha_i)).
    Without free coordinates beta0 is the midpoint of the interval cut out by the
    coordinates sitting at their bounds. Inversions up to gap_tol are accepted.
    """
    alpha = np.asarray(alpha, dtype=float)
    y = qp.y
    yg = y * qp.gradient(alpha)
    span = np.where(np.isfinite(qp.upper), qp.upper - qp.lower, np.maximum(1.0, alpha))
    at_lo = alpha <= qp.lower + free_tol * span
    at_up = alpha >= qp.upper - free_tol * span
    free = ~(at_lo | at_up)
    if np.any(free):
        return float(yg[free].mean())
    lo_mask = ((y > 0) & at_lo) | ((y < 0) & at_up)
    hi_mask = ((y > 0) & at_up) | ((y < 0) & at_lo)
    lo = yg[lo_mask].max() if np.any(lo_mask) else -np.inf
    hi = yg[hi_mask].min() if np.any(hi_mask) else np.inf
    # an approximate solution may invert the interval by up to the solver tolerance
    if lo > hi + max(gap_tol, 1e-6 * (1.0 + abs(lo) + abs(hi))):
        raise SolverError(f"empty intercept interval [{lo:.6g}, {hi:.6g}]")
    if np.isinf(lo) and np.isinf(hi):
        return 0.0
    if np.isinf(lo):
        return float(hi)
    if np.isinf(hi):
        return float(lo)
    return float(0.5 * (lo + hi))
