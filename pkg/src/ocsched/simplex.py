"""Dense two-phase primal simplex on numpy tableaus.

Scope: the LP relaxations and residual LPs of the scheduling MILP.  These are
small (hundreds of rows) but badly conditioned out of the box because volumes
are bytes (~1e8) while times are seconds (~1e-4), so the solver equilibrates
rows and columns by powers of two before pivoting and unscales afterwards
(power-of-two factors keep that transformation bit-exact).

Pivoting is deterministic: entering variable by most negative reduced cost
with lowest-index tie-breaks, leaving row by minimum ratio with lowest
basis-index tie-breaks, falling back to Bland's rule after a long degenerate
streak so cycling cannot occur.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalBreakdown

__all__ = ["LPResult", "simplex_solve"]

_EPS = 1e-9


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: float | None
    x: np.ndarray | None  # structural variable values, original scale
    iterations: int


def _pow2_scale(values: np.ndarray) -> np.ndarray:
    """Per-entry power-of-two factors that bring magnitudes toward 1."""
    out = np.ones_like(values)
    mask = values > 0
    out[mask] = np.exp2(-np.round(np.log2(values[mask])))
    return out


def _geo_extent(mat: np.ndarray, axis: int) -> np.ndarray:
    """Geometric mean of the largest and smallest nonzero magnitude."""
    mag = np.abs(mat)
    big = mag.max(axis=axis)
    masked = np.where(mag > 0, mag, np.inf)
    small = masked.min(axis=axis)
    small = np.where(np.isfinite(small), small, 1.0)
    big = np.where(big > 0, big, 1.0)
    return np.sqrt(big * small)


def _equilibrate(A, b, c):
    m, n = A.shape
    r = np.ones(m)
    s = np.ones(n)
    work = A.copy()
    rhs = b.copy()
    for _ in range(4):
        aug = np.concatenate([work, rhs[:, None]], axis=1)
        rf = _pow2_scale(_geo_extent(aug, axis=1))
        work *= rf[:, None]
        rhs *= rf
        r *= rf
        cf = _pow2_scale(_geo_extent(work, axis=0))
        work *= cf[None, :]
        s *= cf
    return work, rhs, c * s, s


def simplex_solve(
    c: np.ndarray,
    A: np.ndarray,
    senses: list[str],
    b: np.ndarray,
    *,
    tol: float = _EPS,
    max_pivots: int | None = None,
) -> LPResult:
    """Minimize c @ x subject to A x (<=|=|>=) b, x >= 0."""
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    if m == 0:
        # x = 0 is optimal for any nonnegative cost; negative costs unbounded
        if np.any(c < -tol):
            return LPResult("unbounded", None, None, 0)
        return LPResult("optimal", 0.0, np.zeros(n), 0)

    A_s, b_s, c_s, col_scale = _equilibrate(A, b, c)
    senses = list(senses)

    # normalize rhs to be nonnegative, flipping inequality directions
    A_s = A_s.copy()
    b_s = b_s.copy()
    flip = b_s < 0
    A_s[flip] *= -1.0
    b_s[flip] *= -1.0
    flipped = {"<=": ">=", ">=": "<=", "=": "="}
    senses = [flipped[sn] if fl else sn for sn, fl in zip(senses, flip)]

    n_slack = sum(1 for sn in senses if sn != "=")
    n_art = sum(1 for sn in senses if sn != "<=")
    total = n + n_slack + n_art

    tab = np.zeros((m, total + 1))
    tab[:, :n] = A_s
    tab[:, -1] = b_s
    basis = np.empty(m, dtype=int)
    art_cols: list[int] = []
    slack_at = n
    art_at = n + n_slack
    for i, sn in enumerate(senses):
        if sn == "<=":
            tab[i, slack_at] = 1.0
            basis[i] = slack_at
            slack_at += 1
        elif sn == ">=":
            tab[i, slack_at] = -1.0
            slack_at += 1
            tab[i, art_at] = 1.0
            basis[i] = art_at
            art_cols.append(art_at)
            art_at += 1
        else:
            tab[i, art_at] = 1.0
            basis[i] = art_at
            art_cols.append(art_at)
            art_at += 1

    obj2 = np.zeros(total + 1)
    obj2[:n] = c_s
    obj1 = np.zeros(total + 1)
    for col in art_cols:
        obj1[col] = 1.0
    # canonicalize objective rows against the starting basis
    for i, bv in enumerate(basis):
        if obj1[bv] != 0.0:
            obj1 -= obj1[bv] * tab[i]
        if obj2[bv] != 0.0:
            obj2 -= obj2[bv] * tab[i]

    if max_pivots is None:
        max_pivots = max(5000, 40 * (m + 1))
    pivots = 0
    art_set = frozenset(art_cols)

    def pivot(p: int, q: int):
        nonlocal pivots
        piv = tab[p, q]
        tab[p] /= piv
        col = tab[:, q].copy()
        col[p] = 0.0
        tab[:] -= np.outer(col, tab[p])
        tab[:, q] = 0.0
        tab[p, q] = 1.0
        for obj in (obj1, obj2):
            if obj[q] != 0.0:
                obj -= obj[q] * tab[p]
                obj[q] = 0.0
        basis[p] = q
        pivots += 1
        if pivots > max_pivots or not np.isfinite(tab[:, -1]).all():
            raise NumericalBreakdown(
                f"simplex exceeded {max_pivots} pivots or lost finiteness"
            )

    def run_phase(obj: np.ndarray, allowed: np.ndarray, phase1: bool) -> str:
        degenerate_streak = 0
        bland = False
        while True:
            red = obj[:-1]
            candidates = np.where(allowed & (red < -tol))[0]
            if candidates.size == 0:
                return "optimal"
            if bland:
                q = int(candidates[0])
            else:
                q = int(candidates[np.argmin(red[candidates])])
            colvals = tab[:, q]
            pos = colvals > 1e-7
            if not pos.any():
                # only near-null entries: use a guarded pivot rather than
                # declaring a ray on numerical noise
                pos = colvals > 1e-11
            if not pos.any():
                if phase1:
                    # phase 1 is bounded below; a null improving column is
                    # numerical noise, drop it from consideration
                    allowed[q] = False
                    continue
                return "unbounded"
            ratios = np.full(len(basis), np.inf)
            ratios[pos] = tab[pos, -1] / colvals[pos]
            rmin = ratios.min()
            near = np.where(ratios <= rmin + tol)[0]
            p = int(near[np.argmin(basis[near])])
            if tab[p, -1] <= tol:
                degenerate_streak += 1
                if degenerate_streak > len(basis) + 50:
                    bland = True
            else:
                degenerate_streak = 0
                bland = False
            pivot(p, q)

    allowed1 = np.ones(total, dtype=bool)
    status = run_phase(obj1, allowed1, phase1=True)
    if status != "optimal":  # phase 1 is always bounded below by 0
        raise NumericalBreakdown("phase 1 reported unbounded")
    phase1_val = -obj1[-1]
    if phase1_val > 1e-7 * (1.0 + float(np.abs(b_s).max(initial=0.0))):
        return LPResult("infeasible", None, None, pivots)

    # drive leftover artificials out of the basis, dropping redundant rows
    drop_rows = []
    for i in range(m):
        if basis[i] in art_set:
            row = tab[i, :n + n_slack]
            nz = np.where(np.abs(row) > 1e-7)[0]
            if nz.size:
                pivot(i, int(nz[0]))
            else:
                drop_rows.append(i)
    if drop_rows:
        keep = np.array([i for i in range(m) if i not in set(drop_rows)])
        tab = tab[keep]
        basis = basis[keep]
        m = len(basis)

    allowed2 = np.ones(total, dtype=bool)
    for col in art_cols:
        allowed2[col] = False
    status = run_phase(obj2, allowed2, phase1=False)
    if status == "unbounded":
        return LPResult("unbounded", None, None, pivots)

    x_scaled = np.zeros(total)
    x_scaled[basis] = tab[:, -1]
    x = x_scaled[:n] * col_scale
    return LPResult("optimal", float(c @ x), x, pivots)
