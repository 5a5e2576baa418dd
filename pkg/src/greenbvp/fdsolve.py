"""Finite-difference collocation oracle, independent of the kernel code.

Discretizes u'' + gamma*u + sigma(t) = 0 (or + f(t,u) = 0) on a uniform
grid with n interior points, h = 1/(n+1), by second-order central
differences.  One boundary row pins the Dirichlet end; the other carries
the nonlocal condition u(end) = lam * trapezoid(u), which couples that row
to every unknown:

    [ 1                                  ] [u_0  ]   [ 0        ]
    [ 1/h^2  g-2/h^2  1/h^2              ] [u_1  ]   [ -sigma_1 ]
    [        ...                         ] [ ... ] = [  ...     ]
    [              1/h^2  g-2/h^2  1/h^2 ] [u_n  ]   [ -sigma_n ]
    [ -lw_0  -lw_1   ...    -lw_n  1-lw_N] [u_N  ]   [ 0        ]

with lw = lam * trapezoid weights.  The dense row is eliminated by a
Sherman-type reduction: solve the leading tridiagonal block twice (for the
right-hand side and for the border column), then a scalar equation gives
the borderline unknown in O(n).  side="left" mirrors the layout for the
conditions u(0) = lam * int u, u(1) = 0.

Deliberately imports nothing from the kernel modules so that agreement
between this solver and the Green's function route is meaningful evidence.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResonanceError, SearchFailureError
from .params import ProblemParams
from .profile import SolutionProfile

__all__ = ["FDSystem", "solve_fd_linear", "solve_fd_newton"]


def _thomas(lo, di, up, rhs):
    """Solve a tridiagonal system; lo[0] and up[-1] are ignored."""
    n = len(di)
    cp = np.empty(n)
    dp = np.empty(n)
    if di[0] == 0.0:
        raise ResonanceError("singular tridiagonal block (zero pivot)")
    cp[0] = up[0] / di[0]
    dp[0] = rhs[0] / di[0]
    for i in range(1, n):
        den = di[i] - lo[i] * cp[i - 1]
        if den == 0.0:
            raise ResonanceError("singular tridiagonal block (zero pivot)")
        cp[i] = up[i] / den if i < n - 1 else 0.0
        dp[i] = (rhs[i] - lo[i] * dp[i - 1]) / den
    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


@dataclass
class FDSystem:
    """Assembled discretization: tridiagonal part plus one dense border row.

    The three diagonals cover the n+1 non-border rows (the border unknown's
    column is kept separately in border_col); border_row holds the dense
    trapezoid row, border_pos its index (0 or n+1).
    """

    n: int
    h: float
    grid: np.ndarray
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    border_col: np.ndarray
    border_row: np.ndarray
    border_pos: int
    rhs: np.ndarray

    def solve(self) -> np.ndarray:
        """Sherman-type reduction: two tridiagonal solves and a scalar."""
        p = _thomas(self.lower, self.diag, self.upper, self.rhs)
        q = _thomas(self.lower, self.diag, self.upper, -self.border_col)
        w = self.border_row
        if self.border_pos == 0:
            w_other, w_self = w[1:], w[0]
        else:
            w_other, w_self = w[:-1], w[-1]
        den = w_self + w_other @ q
        scale = max(1.0, float(np.max(np.abs(w))))
        if abs(den) < 1e-12 * scale:
            raise ResonanceError(
                f"discrete system is singular (border pivot {den:.3e}); "
                "parameters are at or near resonance")
        u_border = -(w_other @ p) / den
        interior = p + q * u_border
        if self.border_pos == 0:
            return np.concatenate(([u_border], interior))
        return np.concatenate((interior, [u_border]))


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n + 2, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _assemble(params: ProblemParams, sigma_vals: np.ndarray, n: int,
              side: str, diag_shift: np.ndarray | None = None) -> FDSystem:
    if n < 3:
        raise InputError(f"need at least 3 interior points, got {n}")
    if side not in ("left", "right"):
        raise InputError(f"side must be 'left' or 'right', got {side!r}")
    h = 1.0 / (n + 1)
    grid = np.linspace(0.0, 1.0, n + 2)
    lam = params.lam
    wtrap = lam * _trapezoid_weights(n, h)

    # Tridiagonal block over the non-border unknowns; the border unknown's
    # coefficients go to border_col.  Rows: Dirichlet row + n interior rows.
    lower = np.zeros(n + 1)
    diag = np.zeros(n + 1)
    upper = np.zeros(n + 1)
    border_col = np.zeros(n + 1)
    inner = params.gamma - 2.0 / h**2
    if diag_shift is not None:
        inner = inner + diag_shift

    if side == "right":
        # unknowns u_0..u_n in the block, border unknown u_{n+1}
        diag[0] = 1.0                                    # u(0) = 0
        diag[1:] = inner
        lower[1:] = 1.0 / h**2
        upper[1:-1] = 1.0 / h**2
        border_col[-1] = 1.0 / h**2
        border_row = -wtrap.copy()
        border_row[-1] += 1.0                            # u_N - lam*trap(u) = 0
        border_pos = n + 1
    else:
        # unknowns u_1..u_{n+1} in the block, border unknown u_0
        diag[:-1] = inner
        diag[-1] = 1.0                                   # u(1) = 0
        upper[:-1] = 1.0 / h**2
        lower[1:-1] = 1.0 / h**2
        border_col[0] = 1.0 / h**2
        border_row = -wtrap.copy()
        border_row[0] += 1.0                             # u_0 - lam*trap(u) = 0
        border_pos = 0

    rhs = np.zeros(n + 1)
    if side == "right":
        rhs[1:] = -sigma_vals
    else:
        rhs[:-1] = -sigma_vals
    return FDSystem(n=n, h=h, grid=grid, lower=lower, diag=diag, upper=upper,
                    border_col=border_col, border_row=border_row,
                    border_pos=border_pos, rhs=rhs)


def _eval_on(f, t: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(t), dtype=float)
        if out.shape != t.shape:
            raise TypeError
        return out
    except (TypeError, ValueError):
        return np.array([float(f(x)) for x in t])


def solve_fd_linear(params: ProblemParams, sigma, n: int, side: str = "right") -> SolutionProfile:
    """Direct solve of the discretized linear problem with n interior points."""
    if n < 50:
        raise InputError(f"oracle resolution too low: n={n} < 50")
    grid = np.linspace(0.0, 1.0, n + 2)
    sigma_vals = _eval_on(sigma, grid[1:-1])
    system = _assemble(params, sigma_vals, n, side)
    return SolutionProfile(grid, system.solve())


def solve_fd_newton(params: ProblemParams, f, n: int, u0: SolutionProfile | np.ndarray | None,
                    tol: float = 1e-10, max_iter: int = 60, side: str = "right",
                    damping: float = 1.0, clip_negative: bool = True) -> SolutionProfile:
    """Newton iteration on the discrete residual of u'' + gamma u + f(t,u) = 0.

    f is a plain callable f(t, u) operating on arrays; its u-derivative is
    estimated by central differences.  u0 seeds the iteration (zero profile
    when omitted).  Steps are backtracked by halving while they fail to
    reduce the residual; convergence is `max|F| < tol`.
    """
    if n < 10:
        raise InputError(f"need at least 10 interior points, got {n}")
    h = 1.0 / (n + 1)
    grid = np.linspace(0.0, 1.0, n + 2)
    lam = params.lam
    wtrap = lam * _trapezoid_weights(n, h)

    if u0 is None:
        u = np.zeros(n + 2)
    elif isinstance(u0, SolutionProfile):
        u = u0(grid)
    else:
        u = np.asarray(u0, dtype=float).copy()
        if u.shape != grid.shape:
            raise InputError(f"u0 must have {n + 2} values, got {u.shape}")

    def fval(tv, uv):
        ueff = np.maximum(uv, 0.0) if clip_negative else uv
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(f(tv, ueff), dtype=float)

    def residual(uv):
        F = np.empty(n + 2)
        ti = grid[1:-1]
        F[1:-1] = (uv[:-2] - 2.0 * uv[1:-1] + uv[2:]) / h**2 + params.gamma * uv[1:-1] \
            + fval(ti, uv[1:-1])
        if side == "right":
            F[0] = uv[0]
            F[-1] = uv[-1] - wtrap @ uv
        else:
            F[-1] = uv[-1]
            F[0] = uv[0] - wtrap @ uv
        return F

    def dfdu(tv, uv):
        """Central-difference u-derivative, one-sided against the u >= 0 clip."""
        base = np.maximum(uv, 0.0) if clip_negative else uv
        step = 1e-7 * np.maximum(1.0, np.abs(base))
        lo = np.maximum(base - step, 0.0) if clip_negative else base - step
        with np.errstate(over="ignore", invalid="ignore"):
            hi_v = np.asarray(f(tv, base + step), dtype=float)
            lo_v = np.asarray(f(tv, lo), dtype=float)
        return (hi_v - lo_v) / (base + step - lo)

    def rnorm(F):
        return float(np.max(np.abs(F))) if np.all(np.isfinite(F)) else np.inf

    F = residual(u)
    best = rnorm(F)
    for _ in range(max_iter):
        cur = rnorm(F)
        best = min(best, cur)
        if cur < tol:
            return SolutionProfile(grid, u)
        shift = dfdu(grid[1:-1], u[1:-1])
        if not np.all(np.isfinite(shift)):
            raise SearchFailureError("fd Newton Jacobian is not finite", best_residual=best)
        system = _assemble(params, np.zeros(n), n, side, diag_shift=shift)
        # block rows take the non-border residual; the border one enters the
        # scalar stage directly
        system.rhs = -F[:-1] if side == "right" else -F[1:]
        p = _thomas(system.lower, system.diag, system.upper, system.rhs)
        q = _thomas(system.lower, system.diag, system.upper, -system.border_col)
        w = system.border_row
        if side == "right":
            w_other, w_self, f_border = w[:-1], w[-1], F[-1]
        else:
            w_other, w_self, f_border = w[1:], w[0], F[0]
        den = w_self + w_other @ q
        if abs(den) < 1e-12 * max(1.0, float(np.max(np.abs(w)))):
            raise ResonanceError(
                f"Newton linearization is singular (border pivot {den:.3e})")
        d_border = (-f_border - w_other @ p) / den
        interior = p + q * d_border
        if side == "right":
            step_vec = np.concatenate((interior, [d_border]))
        else:
            step_vec = np.concatenate(([d_border], interior))

        alpha = damping
        accepted = False
        for _ in range(30):
            trial = u + alpha * step_vec
            Ft = residual(trial)
            if rnorm(Ft) < cur:
                u, F = trial, Ft
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise SearchFailureError(
                f"fd Newton stalled at residual {cur:.3e}", best_residual=best)
    final = rnorm(residual(u))
    if final < tol:
        return SolutionProfile(grid, u)
    raise SearchFailureError(
        f"fd Newton did not converge in {max_iter} iterations "
        f"(residual {final:.3e})", best_residual=min(best, final))
