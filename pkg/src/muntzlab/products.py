"""Products of Muntz spaces: superlevel-set measures, empirical alpha
constants, the product Remez bound c = alpha_1 ... alpha_k, four-square
monomial witnesses, and a coordinate-descent non-density search."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from muntzlab.errors import ConfigError, ConvergenceError
from muntzlab.exponents import ExponentSequence, truncate
from muntzlab.minimax import discrete_minimax_lp, growth_sweep, orthonormalize
from muntzlab.muntzeval import MuntzPolynomial, basis_matrix
from muntzlab.remezlab import QUERY_POINTS, default_set_family
from muntzlab.sets import Grid, discretize, fat_cantor, normalize

ALPHA_Y_POINTS = 16  # y grid on [0, 1 - s] for alpha estimation
ALPHA_BISECTION_REL = 1e-3


@dataclass(frozen=True)
class ProductSpaceSpec:
    sequences: tuple[ExponentSequence, ...]

    def __post_init__(self):
        if not self.sequences:
            raise ConfigError("need k >= 1 sequences")

    @property
    def k(self) -> int:
        return len(self.sequences)


@dataclass(frozen=True)
class ProductPolynomial:
    factors: tuple[MuntzPolynomial, ...]

    def __call__(self, x):
        return eval_product(self, x)


@dataclass(frozen=True)
class AlphaEstimate:
    j: int
    n: int
    s: float
    k: int
    alpha: float
    sample_count: int


@dataclass(frozen=True)
class ProductCheckReport:
    samples: int
    violations: int
    c: float
    ratios: tuple[float, ...]


@dataclass(frozen=True)
class ChainReport:
    products: int
    checks: int
    measure_violations: int
    norm_violations: int


@dataclass(frozen=True)
class MonomialWitness:
    factors: ProductPolynomial
    decomposition: tuple[int, int, int, int]
    max_abs_deviation: float


@dataclass(frozen=True)
class SearchReport:
    best_error_by_round: tuple[float, ...]
    best: ProductPolynomial
    restarts: int


def eval_product(P: ProductPolynomial, x):
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    vals = np.ones_like(arr)
    for p in P.factors:
        vals = vals * (basis_matrix(arr, p.exponents) @ np.asarray(p.coefficients))
    return float(vals[0]) if np.asarray(x).ndim == 0 else vals


def _cells(y: float, mesh: float) -> tuple[np.ndarray, float]:
    """Midpoints and width of a uniform cell partition of [y, 1]."""
    ncells = max(1, math.ceil((1.0 - y) / mesh - 1e-12))
    w = (1.0 - y) / ncells
    mids = y + w * (np.arange(ncells) + 0.5)
    return mids, w


def superlevel_measure(p, y: float, theta: float, mesh: float) -> float:
    """Grid-cell measure of {x in [y,1] : |p(x)| > theta * |p(y)|}."""
    if y >= 1.0:
        raise ConfigError("y must be < 1")
    if theta <= 0:
        raise ConfigError("theta must be positive")
    mids, w = _cells(y, mesh)
    pv = np.abs(np.asarray(p(mids), dtype=float))
    py = abs(float(p(y)))
    return w * int(np.count_nonzero(pv > theta * py))


def sample_factors(exponents, budget: int, rng, mesh: float) -> list[MuntzPolynomial]:
    """Random span elements with standard-normal coefficients in the basis
    orthonormalized over a grid of [0, 1] (scale-invariant statistics; the
    raw monomial basis would concentrate samples pathologically)."""
    exps = tuple(float(e) for e in exponents)
    grid = discretize(normalize([[0.0, 1.0]]), mesh)
    V = basis_matrix(grid.as_array(), exps)
    _, R = orthonormalize(V)
    out = []
    for _ in range(budget):
        b = rng.standard_normal(len(exps))
        coeffs = np.linalg.solve(R, b)
        out.append(MuntzPolynomial(exps, tuple(float(c) for c in coeffs)))
    return out


def draw_alpha_samples(
    seq_j: ExponentSequence,
    n: int,
    s: float,
    budget: int,
    seed: int,
    mesh: float,
    j: int = 0,
) -> list[MuntzPolynomial]:
    """The deterministic sample family behind estimate_alpha: `budget`
    random span elements plus the growth-LP extremals for the endpoint
    constraint interval [1-s, 1]."""
    if budget < 1:
        raise ConfigError("budget must be >= 1")
    exps = truncate(seq_j, n)
    rng = np.random.default_rng([seed, j])
    samples = sample_factors(exps, budget, rng, mesh)
    grid = discretize(normalize([[1.0 - s, 1.0]]), mesh)
    queries = [0.0, 0.5 * (1.0 - s)]
    samples.extend(r.extremal for r in growth_sweep(exps, grid, queries))
    return [p for p in samples if max(abs(c) for c in p.coefficients) > 0]


def _needed_alpha(pv: np.ndarray, w: float, py: float, target: float) -> float:
    """Smallest alpha with w * #{|p| > py/alpha} >= target, by bisection
    to ALPHA_BISECTION_REL relative."""
    if target <= 0:
        return 1.0

    def ok(alpha: float) -> bool:
        return w * int(np.count_nonzero(pv > py / alpha)) >= target - 1e-12

    if py == 0.0:
        # superlevel set is {p != 0}; alpha-independent
        return 1.0 if ok(1.0) else math.inf
    if ok(1.0):
        return 1.0
    lo, hi = 1.0, 2.0
    while not ok(hi):
        lo, hi = hi, hi * 2.0
        if hi > 1e15:
            raise ConvergenceError("alpha bisection diverged")
    while hi - lo > ALPHA_BISECTION_REL * lo:
        mid = math.sqrt(lo * hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def alpha_y_grid(s: float) -> np.ndarray:
    return np.linspace(0.0, 1.0 - s, ALPHA_Y_POINTS)


def estimate_alpha(
    seq_j: ExponentSequence,
    n: int,
    s: float,
    k: int,
    budget: int,
    seed: int,
    mesh: float,
    j: int = 0,
) -> AlphaEstimate:
    """Empirical per-factor constant: the smallest alpha such that every
    sampled span element p and every y on a grid of [0, 1-s] satisfies
    m({x in [y,1] : |p(x)| > |p(y)|/alpha}) >= 1 - y - s/(2k)."""
    if not 0.0 < s < 1.0:
        raise ConfigError("s must lie in (0, 1)")
    samples = draw_alpha_samples(seq_j, n, s, budget, seed, mesh, j=j)
    alpha = 1.0
    for y in alpha_y_grid(s):
        mids, w = _cells(y, mesh)
        target = 1.0 - y - s / (2.0 * k)
        V = basis_matrix(mids, truncate(seq_j, n))
        Vy = basis_matrix(np.array([y]), truncate(seq_j, n))[0]
        for p in samples:
            coeffs = np.asarray(p.coefficients)
            pv = np.abs(V @ coeffs)
            py = abs(float(Vy @ coeffs))
            alpha = max(alpha, _needed_alpha(pv, w, py, target))
    return AlphaEstimate(j=j, n=n, s=s, k=k, alpha=alpha,
                         sample_count=len(samples))


def _random_admissible_set(rng, s: float, rho: float, idx: int):
    """Rotating templates of sets inside [rho, 1] with measure >= s."""
    span = 1.0 - rho
    kind = idx % 3
    if kind == 2 and 0.625 * span >= s:
        return fat_cantor(2, carrier=(rho, 1.0))
    if kind == 1 and span >= s + 0.02:
        half = s / 2.0
        gap = span - s
        a = rho + rng.uniform(0.0, gap / 2.0)
        b = a + half + rng.uniform(gap / 4.0, gap / 2.0)
        b = min(b, 1.0 - half)
        return normalize([[a, a + half], [b, b + half]])
    a = rho + rng.uniform(0.0, max(span - s, 0.0))
    return normalize([[a, a + s]])


def verify_product_remez(
    spec: ProductSpaceSpec,
    n: int,
    s: float,
    rho: float,
    alphas,
    budget: int,
    seed: int,
    mesh: float,
) -> ProductCheckReport:
    """Sample fresh product polynomials and admissible sets A in [rho, 1]
    of measure >= s and check ||p||_[0,rho] <= c ||p||_A on grids, with
    c = alpha_1 ... alpha_k.  The alphas are empirical, so rare
    out-of-sample violations are possible and merely counted."""
    alphas = list(alphas)
    if len(alphas) != spec.k:
        raise ConfigError("need one alpha estimate per factor space")
    for a in alphas:
        if abs(a.s - s) > 1e-12 or a.k != spec.k:
            raise ConfigError("alpha estimates do not match (s, k)")
    c = math.prod(a.alpha for a in alphas)
    rng = np.random.default_rng([seed, 9000 + spec.k])
    per_factor = [
        sample_factors(truncate(seq, n), budget, np.random.default_rng([seed, 100 + j]), mesh)
        for j, seq in enumerate(spec.sequences)
    ]
    ys = np.linspace(0.0, rho, QUERY_POINTS)
    violations = 0
    ratios = []
    for i in range(budget):
        P = ProductPolynomial(tuple(per_factor[j][i] for j in range(spec.k)))
        A = _random_admissible_set(rng, s, rho, i)
        gridA = discretize(A, mesh)
        pa = float(np.max(np.abs(eval_product(P, gridA.as_array()))))
        pq = float(np.max(np.abs(eval_product(P, ys))))
        if pa == 0.0:
            continue
        ratio = pq / pa
        ratios.append(ratio)
        if ratio > c * (1.0 + 1e-9):
            violations += 1
    return ProductCheckReport(samples=len(ratios), violations=violations,
                              c=c, ratios=tuple(ratios))


def inequality_chain_report(
    spec: ProductSpaceSpec,
    n: int,
    s: float,
    rho: float,
    alphas,
    budget: int,
    seed: int,
    mesh: float,
) -> ChainReport:
    """Transcribe the product-bound derivation on the grid for in-sample
    products (elementwise pairing of the alpha sample families): the
    intersection of the k per-factor superlevel sets on [y, 1] must have
    measure >= 1 - y - s/2, and the resulting norm bound
    ||p||_[0,rho] <= (alpha_1...alpha_k) ||p||_A must hold for the default
    admissible family."""
    alphas = list(alphas)
    if len(alphas) != spec.k:
        raise ConfigError("need one alpha estimate per factor space")
    c = math.prod(a.alpha for a in alphas)
    families = [
        draw_alpha_samples(seq, n, s, budget, seed, mesh, j=j)
        for j, seq in enumerate(spec.sequences)
    ]
    n_products = min(len(f) for f in families)
    ys = [y for y in alpha_y_grid(s) if y <= rho + 1e-12]
    sets = default_set_family(s, rho)
    set_grids = [discretize(A, mesh) for A in sets]
    checks = 0
    measure_bad = 0
    norm_bad = 0
    query_grid = np.linspace(0.0, rho, QUERY_POINTS)
    for i in range(n_products):
        factors = tuple(families[j][i] for j in range(spec.k))
        P = ProductPolynomial(factors)
        for y in ys:
            mids, w = _cells(y, mesh)
            inside = np.ones(len(mids), dtype=bool)
            for j, (p, a) in enumerate(zip(factors, alphas)):
                pv = np.abs(np.asarray(p(mids)))
                py = abs(float(p(y)))
                inside &= pv > py / a.alpha
            inter = w * int(np.count_nonzero(inside))
            checks += 1
            if inter < 1.0 - y - s / 2.0 - 1e-12:
                measure_bad += 1
        pq = float(np.max(np.abs(eval_product(P, query_grid))))
        for g in set_grids:
            pa = float(np.max(np.abs(eval_product(P, g.as_array()))))
            checks += 1
            if pq > c * pa * (1.0 + 1e-9):
                norm_bad += 1
    return ChainReport(products=n_products, checks=checks,
                       measure_violations=measure_bad, norm_violations=norm_bad)


def four_squares(n: int) -> tuple[int, int, int, int]:
    """Lexicographically largest (a, b, c, d) with a >= b >= c >= d >= 0
    and a^2 + b^2 + c^2 + d^2 = n (exists for every n by Lagrange)."""
    if n < 0:
        raise ConfigError("n must be nonnegative")
    for a in range(math.isqrt(n), -1, -1):
        r1 = n - a * a
        if r1 > 3 * a * a:
            break  # b, c, d <= a cannot cover the remainder
        for b in range(min(a, math.isqrt(r1)), -1, -1):
            r2 = r1 - b * b
            if r2 > 2 * b * b:
                break
            for cc in range(min(b, math.isqrt(r2)), -1, -1):
                r3 = r2 - cc * cc
                if r3 > cc * cc:
                    break
                d = math.isqrt(r3)
                if d * d == r3:
                    return (a, b, cc, d)
    raise AssertionError(f"no four-square decomposition found for {n}")


def monomial_in_H4(n: int, grid: Grid) -> MonomialWitness:
    """x^n as a product of four square-exponent monomials, with the
    floating-point deviation of the evaluated product from x^n."""
    a, b, c, d = four_squares(n)
    factors = ProductPolynomial(tuple(
        MuntzPolynomial((float(t * t),), (1.0,)) for t in (a, b, c, d)
    ))
    x = grid.as_array()
    direct = basis_matrix(x, [float(n)])[:, 0]
    dev = float(np.max(np.abs(eval_product(factors, x) - direct)))
    return MonomialWitness(factors=factors, decomposition=(a, b, c, d),
                           max_abs_deviation=dev)


def product_approx_search(
    target_samples,
    grid: Grid,
    spec: ProductSpaceSpec,
    n: int,
    rounds: int,
    seed: int,
    restarts: int = 1,
) -> SearchReport:
    """Coordinate descent for min over products of max_grid |f - prod p_j|.

    Each inner subproblem fixes all factors but one; with g the product of
    the fixed factors, min over p_j of max |f - g * p_j| is a linear
    minimax in p_j's coefficients (weighted basis g(x) x^lambda) and is
    solved by LP.  Points where g vanishes stay in as constraints bounding
    |f| there; no division by g ever happens.  best_error_by_round is the
    running best over all restarts, nonincreasing by construction.
    """
    if rounds < 1:
        raise ConfigError("rounds must be >= 1")
    x = grid.as_array()
    f = np.asarray(target_samples, dtype=float)
    if f.shape != x.shape:
        raise ConfigError("target samples must match the grid")
    V = [basis_matrix(x, truncate(seq, n)) for seq in spec.sequences]
    dims = [v.shape[1] for v in V]
    rng = np.random.default_rng([seed, 777])

    best_by_round = [math.inf] * rounds
    best_err = math.inf
    best_coeffs = None
    for restart in range(restarts):
        coeffs = []
        for j in range(spec.k):
            c = np.zeros(dims[j])
            c[0] = 1.0
            if restart > 0:
                c = c + 0.5 * rng.standard_normal(dims[j])
            coeffs.append(c)
        F = [V[j] @ coeffs[j] for j in range(spec.k)]
        cur = float(np.max(np.abs(f - np.prod(F, axis=0))))
        for t in range(rounds):
            for j in range(spec.k):
                g = np.prod([F[i] for i in range(spec.k) if i != j], axis=0) \
                    if spec.k > 1 else np.ones_like(x)
                if not np.any(g):
                    # dead product: perturb this factor's complement
                    for i in range(spec.k):
                        if i != j:
                            coeffs[i] = coeffs[i] + 0.1 * rng.standard_normal(dims[i])
                            F[i] = V[i] @ coeffs[i]
                    continue
                B = g[:, None] * V[j]
                c_new, err = discrete_minimax_lp(B, f)
                if err <= cur:
                    coeffs[j] = c_new
                    F[j] = V[j] @ c_new
                    cur = err
            if cur < best_by_round[t]:
                best_by_round[t] = cur
            if cur < best_err:
                best_err = cur
                best_coeffs = [c.copy() for c in coeffs]
        # a later restart must not raise the recorded floor of earlier rounds
        for t in range(1, rounds):
            best_by_round[t] = min(best_by_round[t], best_by_round[t - 1])

    factors = tuple(
        MuntzPolynomial(tuple(truncate(seq, n)), tuple(float(v) for v in c))
        for seq, c in zip(spec.sequences, best_coeffs)
    )
    return SearchReport(best_error_by_round=tuple(best_by_round),
                        best=ProductPolynomial(factors), restarts=restarts)
