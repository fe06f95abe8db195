"""Discrete minimax engine for finite Muntz systems.

Two solvers share one orthonormalization front end:

* best_uniform_approx - discrete Remez exchange on a grid, returning an
  equioscillation certificate (alternating reference points plus a
  de-la-Vallee-Poussin lower bound).
* growth_functional   - the extremal-growth linear program
  sup { |p(y)| : |p| <= 1 on the constraint grid }, solved as a dense LP.

Raw monomial columns x^lambda are numerically collinear well before
dimension 10, so every solve runs in coordinates of the QR-orthonormalized
evaluated basis and maps coefficients back at the end.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from muntzlab.errors import (
    ConditioningError,
    ConfigError,
    ConvergenceError,
    UnboundedGrowthError,
)
from muntzlab.muntzeval import MuntzPolynomial, basis_matrix
from muntzlab.sets import Grid

DEFAULT_TOL = 1e-8
MAX_EXCHANGES = 200
RANK_TOL = 1e-14


@dataclass(frozen=True)
class EquioscillationResult:
    approximant: MuntzPolynomial
    error: float
    reference_points: tuple[float, ...]
    certified_lower_bound: float
    relative_gap: float


@dataclass(frozen=True)
class GrowthResult:
    value: float
    extremal: MuntzPolynomial
    query: float
    constraint_active_points: tuple[float, ...]


def chebyshev_T(n: int, x: float) -> float:
    """Degree-n Chebyshev polynomial: cos form on [-1,1], three-term
    recurrence outside (stable there, unlike acos continuation)."""
    if n < 0:
        raise ConfigError("degree must be nonnegative")
    if abs(x) <= 1.0:
        return float(math.cos(n * math.acos(x)))
    t_prev, t_cur = 1.0, float(x)
    if n == 0:
        return t_prev
    for _ in range(n - 1):
        t_prev, t_cur = t_cur, 2.0 * x * t_cur - t_prev
    return t_cur


def orthonormalize(V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Economic QR of the evaluated basis with a rank sanity check.

    Columns are rescaled to unit sup-norm on the grid first (x^lambda for
    large lambda underflows to near zero away from 1, which would trip the
    rank check without being a genuine dependency); the scaling is folded
    back into R, so V = Q R still holds.
    """
    if V.shape[0] < V.shape[1]:
        raise ConditioningError(
            f"grid of {V.shape[0]} points cannot support dimension {V.shape[1]}"
        )
    scale = np.max(np.abs(V), axis=0)
    if np.any(scale == 0.0):
        raise ConditioningError("basis column vanishes identically on the grid")
    Q, R = np.linalg.qr(V / scale)
    d = np.abs(np.diag(R))
    if d.min() <= RANK_TOL * d.max():
        raise ConditioningError(
            "evaluated basis is numerically rank-deficient on this grid "
            f"(diagonal ratio {d.min() / d.max():.2e})"
        )
    return Q, R * scale


def _alternating_extrema(r: np.ndarray) -> list[int]:
    """Indices of per-sign-run maxima of |r|: an alternating extremum
    sequence containing the global argmax (smallest-index tie-break)."""
    out: list[int] = []
    cur_sign = 0.0
    cur_best = -1
    for i, ri in enumerate(r):
        s = math.copysign(1.0, ri) if ri != 0.0 else 0.0
        if s == 0.0:
            continue
        if s != cur_sign:
            if cur_best >= 0:
                out.append(cur_best)
            cur_sign = s
            cur_best = i
        elif abs(ri) > abs(r[cur_best]):
            cur_best = i
    if cur_best >= 0:
        out.append(cur_best)
    return out


def _trim_reference(ext: list[int], r: np.ndarray, size: int) -> list[int]:
    """Shrink an alternating extremum list to `size` points, preserving
    alternation and the global maximum."""
    ext = list(ext)
    while len(ext) > size:
        if len(ext) - size == 1:
            # drop the weaker endpoint
            if abs(r[ext[0]]) <= abs(r[ext[-1]]):
                ext.pop(0)
            else:
                ext.pop()
        else:
            # drop the adjacent pair with the smallest peak
            pair = min(
                range(len(ext) - 1),
                key=lambda i: max(abs(r[ext[i]]), abs(r[ext[i + 1]])),
            )
            del ext[pair:pair + 2]
    return ext


def _single_exchange(ref: list[int], r: np.ndarray) -> list[int]:
    """Classical one-point exchange: swap the global argmax of |r| into the
    reference so that residual signs keep alternating.  Strictly increases
    the leveled error, which rules out cycling."""
    z = int(np.argmax(np.abs(r)))
    if z in ref:
        return list(ref)
    s = math.copysign(1.0, r[z])
    out = list(ref)
    i = bisect.bisect_left(out, z)
    if i == 0:
        if math.copysign(1.0, r[out[0]]) == s:
            out[0] = z
        else:
            out.insert(0, z)
            out.pop()
    elif i == len(out):
        if math.copysign(1.0, r[out[-1]]) == s:
            out[-1] = z
        else:
            out.append(z)
            out.pop(0)
    else:
        if math.copysign(1.0, r[out[i - 1]]) == s:
            out[i - 1] = z
        else:
            out[i] = z
    return sorted(out)


def best_uniform_approx(
    f_values,
    grid: Grid,
    exponents,
    tol: float = DEFAULT_TOL,
    max_iter: int = MAX_EXCHANGES,
) -> EquioscillationResult:
    """Best uniform approximation to samples f on the grid from
    span{x^lambda_j}, by discrete Remez exchange.

    Finite Muntz systems are Chebyshev systems on [0,1], so the optimum
    carries an alternating reference of dimension+1 points; the minimum
    absolute residual there is a certified lower bound on the error.
    """
    x = grid.as_array()
    f = np.asarray(f_values, dtype=float)
    exps = tuple(float(e) for e in exponents)
    m = len(exps)
    if f.shape != x.shape:
        raise ConfigError("target samples must match the grid")
    if len(x) <= m:
        raise ConfigError(f"grid of {len(x)} points too small for dimension {m}")

    scale = float(np.max(np.abs(f))) if f.size else 0.0
    gap_floor = 1e-9 * max(1.0, scale)
    if scale == 0.0:
        zero = MuntzPolynomial(exps, (0.0,) * m)
        return EquioscillationResult(zero, 0.0, (), 0.0, 0.0)

    V = basis_matrix(x, exps)
    Q, R = orthonormalize(V)

    N = len(x)
    ref = sorted(set(np.linspace(0, N - 1, m + 1).round().astype(int)))
    while len(ref) < m + 1:  # collisions only on near-minimal grids
        pool = sorted(set(range(N)) - set(ref))
        ref.append(pool[0])
        ref = sorted(ref)
    sigma = np.array([(-1.0) ** i for i in range(m + 1)])

    b = np.zeros(m)
    r = f.copy()
    err = float(np.max(np.abs(r)))
    for _ in range(max_iter):
        A = np.column_stack([Q[ref], sigma])
        try:
            sol = np.linalg.solve(A, f[ref])
        except np.linalg.LinAlgError as exc:
            raise ConditioningError("singular reference system") from exc
        b, E = sol[:m], sol[m]
        r = f - Q @ b
        err = float(np.max(np.abs(r)))
        if err - abs(E) <= tol * max(err, gap_floor):
            break
        if err <= 1e-12 * scale:
            break  # target numerically in the span; residual is noise
        ext = _alternating_extrema(r)
        if len(ext) < m + 1:
            break  # residual too flat to exchange further
        new_ref = _trim_reference(ext, r, m + 1)
        # Accept the multi-point exchange only if the leveled error strictly
        # grows; otherwise fall back to the one-point exchange, which always
        # does.  Without this guard the multi-exchange can cycle.
        if new_ref != ref:
            A2 = np.column_stack([Q[new_ref], sigma])
            try:
                E_new = np.linalg.solve(A2, f[new_ref])[m]
            except np.linalg.LinAlgError:
                E_new = 0.0
            if abs(E_new) <= abs(E) * (1.0 + 1e-13):
                new_ref = _single_exchange(ref, r)
        else:
            new_ref = _single_exchange(ref, r)
        if new_ref == ref:
            break
        ref = new_ref
    else:
        raise ConvergenceError(f"no convergence within {max_iter} exchanges")

    coeffs = np.linalg.solve(R, b)
    approx = MuntzPolynomial(exps, tuple(float(c) for c in coeffs))
    lower = float(np.min(np.abs(r[ref])))
    # An error at the noise floor is an exact fit; the de la Vallee Poussin
    # certificate carries no information there, so the gap is reported as 0.
    gap = 0.0 if err <= gap_floor else (err - lower) / err
    return EquioscillationResult(
        approximant=approx,
        error=err,
        reference_points=tuple(float(x[i]) for i in ref),
        certified_lower_bound=lower,
        relative_gap=gap,
    )


def _growth_lp(Q: np.ndarray, q: np.ndarray) -> np.ndarray:
    """maximize |q . b| subject to -1 <= Q b <= 1; returns optimal b.

    Variables carry large finite box bounds (HiGHS loses its footing on
    fully free variables when the optimum is huge); a solution pinned to
    the box means the problem is effectively unbounded, and the box grows
    a few times before that verdict to rule out merely-large optima.
    """
    N, m = Q.shape
    A_ub = np.vstack([Q, -Q])
    b_ub = np.ones(2 * N)
    # The feasible set is symmetric under b -> -b, so maximizing +q.b and
    # -q.b are the same problem; HiGHS occasionally solves only one of the
    # two formulations at extreme optimum magnitudes, so both appear in
    # the attempt ladder, along with free vs large-box variable bounds.
    attempts = [
        (sign, box, presolve)
        for box, presolve in ((None, True), (None, False), (1e14, True),
                              (1e14, False), (1e17, False))
        for sign in (1.0, -1.0)
    ]
    last_msg = ""
    for sign, box, presolve in attempts:
        bounds = [(None, None)] * m if box is None else [(-box, box)] * m
        res = linprog(-sign * q, A_ub=A_ub, b_ub=b_ub, bounds=bounds,
                      method="highs", options={"presolve": presolve})
        if res.status == 3:
            raise UnboundedGrowthError(
                "growth LP unbounded: constraint grid too coarse for "
                "this basis"
            )
        if res.status == 0:
            if box is not None and np.max(np.abs(res.x)) >= 0.99 * box:
                if box >= 1e17:
                    raise UnboundedGrowthError(
                        "growth LP solution pinned to its box: constraint "
                        "grid too coarse for this basis"
                    )
                continue  # pinned solution: box too tight for this optimum
            return res.x
        last_msg = res.message
    raise ConvergenceError(f"growth LP failed: {last_msg}")


def growth_functional(exponents, constraint: Grid, query: float) -> GrowthResult:
    """sup { |p(query)| : p in span, |p| <= 1 on the constraint grid }."""
    return growth_sweep(exponents, constraint, [query])[0]


def _set_chebyshev(Q: np.ndarray, tol: float, max_iter: int = MAX_EXCHANGES):
    """Extremal element for queries outside the constraint hull: the
    generalized Chebyshev polynomial of the span on the grid, i.e. the
    element alternating between +-1 at dimension many grid points with
    sup-norm 1.  Found by Remez-style exchange in Q coordinates.

    Returns (b, ref): coordinates with max |Q b| = 1 (within tol) and the
    alternation indices.
    """
    N, m = Q.shape
    ref = sorted(set(np.linspace(0, N - 1, m).round().astype(int)))
    while len(ref) < m:
        pool = sorted(set(range(N)) - set(ref))
        ref.append(pool[0])
        ref = sorted(ref)
    sigma = np.array([(-1.0) ** i for i in range(m)])
    b = None
    for _ in range(max_iter):
        try:
            b = np.linalg.solve(Q[ref], sigma)
        except np.linalg.LinAlgError as exc:
            raise ConditioningError("singular reference system") from exc
        vals = Q @ b
        M = float(np.max(np.abs(vals)))
        if M <= 1.0 + tol:
            return b, ref
        ext = _alternating_extrema(vals)
        if len(ext) < m:
            break
        new_ref = _trim_reference(ext, vals, m)
        if new_ref == ref:
            break
        ref = new_ref
    else:
        raise ConvergenceError(
            f"set-Chebyshev exchange: no convergence within {max_iter} steps"
        )
    # stationary without certifying M = 1: rescale to a feasible element
    vals = Q @ b
    return b / np.max(np.abs(vals)), ref


MP_VALUE_THRESHOLD = 1e8  # route growth values above this through mpmath


def _set_chebyshev_mp(x: np.ndarray, exps, queries, tol: float = 1e-12,
                      max_iter: int = MAX_EXCHANGES):
    """High-precision variant of _set_chebyshev working directly in the
    monomial basis.

    Growth values of ~1e10 and beyond span more decades between grid and
    query than a double-precision basis can carry (any eps-level basis
    perturbation wrecks the query value), so the alternation solve and the
    query evaluation run in 60-digit arithmetic and only the final scalars
    come back as floats.

    Returns (values at queries, extremal coefficients, reference indices).
    """
    import mpmath as mp

    m = len(exps)
    N = len(x)
    with mp.workdps(60):
        B = [[mp.power(mp.mpf(float(xi)), mp.mpf(float(e))) if xi > 0
              else (mp.mpf(1) if e == 0 else mp.mpf(0))
              for e in exps] for xi in x]
        sigma = [mp.mpf((-1.0) ** i) for i in range(m)]
        ref = sorted(set(np.linspace(0, N - 1, m).round().astype(int)))
        while len(ref) < m:
            pool = sorted(set(range(N)) - set(ref))
            ref.append(pool[0])
            ref = sorted(ref)
        a = None
        for _ in range(max_iter):
            A = mp.matrix([B[i] for i in ref])
            a = mp.lu_solve(A, mp.matrix(sigma))
            vals_mp = [mp.fsum(B[i][j] * a[j] for j in range(m))
                       for i in range(N)]
            M = max(abs(v) for v in vals_mp)
            if M <= 1 + mp.mpf(tol):
                break
            vals = np.array([float(v) for v in vals_mp])
            ext = _alternating_extrema(vals)
            if len(ext) < m:
                break
            new_ref = _trim_reference(ext, vals, m)
            if new_ref == ref:
                break
            ref = new_ref
        else:
            raise ConvergenceError(
                f"set-Chebyshev exchange (mp): no convergence within "
                f"{max_iter} steps"
            )
        values = []
        for y in queries:
            ym = mp.mpf(float(y))
            py = mp.fsum(
                (mp.power(ym, mp.mpf(float(e))) if y > 0
                 else (mp.mpf(1) if e == 0 else mp.mpf(0))) * a[j]
                for j, e in enumerate(exps)
            )
            values.append(float(abs(py) / M))
        coeffs = [float(a[j] / M) for j in range(m)]
    return values, coeffs, ref


def growth_sweep(exponents, constraint: Grid, queries) -> list[GrowthResult]:
    """growth_functional over many query points with one shared QR.

    The query points join the grid rows in the orthonormalization, so the
    LP objective (point evaluation at the query) is a plain row of Q and
    never passes through an ill-conditioned triangular solve.
    """
    exps = tuple(float(e) for e in exponents)
    x = constraint.as_array()
    ys = [float(y) for y in queries]
    if any(not 0.0 <= y <= 1.0 for y in ys):
        raise ConfigError("query must lie in [0, 1]")
    if len(x) < len(exps):
        raise UnboundedGrowthError(
            f"constraint grid of {len(x)} points cannot pin down dimension "
            f"{len(exps)}"
        )
    V = basis_matrix(np.concatenate([x, np.asarray(ys)]), exps)
    Qall, R = orthonormalize(V)
    Q = Qall[: len(x)]
    lo, hi = float(x.min()), float(x.max())

    # One shared extremal serves every query outside the constraint hull:
    # the generalized Chebyshev element of the span on the grid.  Queries
    # inside the hull (gaps of the set) fall back to a per-query LP.
    outside = [y < lo or y > hi for y in ys]
    cheb_b = None
    mp_results = None
    if any(outside):
        cheb_b, _ = _set_chebyshev(Q, tol=1e-10)
        peak = max(abs(float(Qall[len(x) + i] @ cheb_b))
                   for i, y in enumerate(ys) if outside[i])
        if peak > MP_VALUE_THRESHOLD:
            # beyond double-precision reach: redo in 60-digit arithmetic
            out_ys = [y for y, o in zip(ys, outside) if o]
            vals, mp_coeffs, _ = _set_chebyshev_mp(x, exps, out_ys)
            mp_results = dict(zip(out_ys, vals))

    out = []
    for i, y in enumerate(ys):
        q = Qall[len(x) + i]
        if outside[i] and mp_results is not None:
            coeffs = mp_coeffs
            value = mp_results[y]
            p = MuntzPolynomial(exps, tuple(float(c) for c in coeffs))
            on_grid = basis_matrix(x, exps) @ np.asarray(coeffs)
        else:
            b = cheb_b if outside[i] else _growth_lp(Q, q)
            coeffs = np.linalg.solve(R, b)
            value = abs(float(q @ b))
            p = MuntzPolynomial(exps, tuple(float(c) for c in coeffs))
            on_grid = Q @ b
        active = tuple(float(xi) for xi, v in zip(x, np.abs(on_grid))
                       if v >= 1.0 - 1e-7)
        out.append(GrowthResult(
            value=value,
            extremal=p,
            query=float(y),
            constraint_active_points=active,
        ))
    return out


def discrete_minimax_lp(B: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, float]:
    """min over c of max_i |f_i - (B c)_i| for an arbitrary basis matrix B
    (no Chebyshev-system assumption), as a dense LP.

    Numerically dependent columns are projected out via column-pivoted QR;
    their coefficients come back as 0.
    """
    N, m = B.shape
    col_scale = np.max(np.abs(B), axis=0)
    keep = np.flatnonzero(col_scale > 0)
    if keep.size == 0:
        # basis vanishes identically: best approximant is 0
        return np.zeros(m), float(np.max(np.abs(f))) if f.size else 0.0
    Bk = B[:, keep]
    Q, R = np.linalg.qr(Bk)
    d = np.abs(np.diag(R))
    rank_ok = d > RANK_TOL * d.max()
    if not rank_ok.all():
        # fall back to a well-conditioned column subset
        from scipy.linalg import qr as sqr

        Qp, Rp, piv = sqr(Bk, mode="economic", pivoting=True)
        dd = np.abs(np.diag(Rp))
        r = int(np.sum(dd > RANK_TOL * dd.max()))
        keep = keep[piv[:r]]
        Bk = B[:, keep]
        Q, R = np.linalg.qr(Bk)
    k = Q.shape[1]
    # variables: (b, t); minimize t s.t. -t <= f - Q b <= t
    c = np.zeros(k + 1)
    c[-1] = 1.0
    A_ub = np.block([
        [Q, -np.ones((N, 1))],
        [-Q, -np.ones((N, 1))],
    ])
    b_ub = np.concatenate([f, -f])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub,
                  bounds=[(None, None)] * k + [(0, None)], method="highs")
    if res.status != 0:
        raise ConvergenceError(f"minimax LP failed: {res.message}")
    b = res.x[:k]
    coeffs = np.zeros(m)
    coeffs[keep] = np.linalg.solve(R, b)
    return coeffs, float(res.x[-1])
