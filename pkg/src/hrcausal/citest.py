"""Conditional-independence tests and information-theoretic estimators.

Two CI tests drive the discovery stages: ParCorr (linear, analytic
p-value) and GPDC (Gaussian-process residuals + distance correlation
with a permutation null). Transfer entropy is estimated with the
Kraskov k-nearest-neighbour CMI estimator under the max-norm. All
randomness is seeded through explicit arguments; nothing touches the
global RNG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist
from scipy.special import digamma
from scipy.stats import t as t_dist

from .errors import DegenerateDataError, InsufficientDataError, NumericalError

CI_TEST_KINDS = ("parcorr", "gpdc")

# Noise-variance grid and jitter ladder for the GP fit. The grid keeps the
# fit deterministic (no iterative optimizer); jitter only rescues Cholesky.
_GP_NOISE_GRID = tuple(np.logspace(-3.0, 0.0, 7))
_JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


@dataclass(frozen=True)
class CITestResult:
    statistic: float
    p_value: float

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p_value must be in [0, 1], got {self.p_value}")
        if not np.isfinite(self.statistic):
            raise ValueError(f"statistic must be finite, got {self.statistic}")


@dataclass(frozen=True)
class CITestConfig:
    """Which CI test to run and its knobs (permutations, kNN size, seed)."""

    kind: str = "parcorr"
    permutations: int = 200
    knn_k: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.kind not in CI_TEST_KINDS:
            raise ValueError(f"unknown CI test kind {self.kind!r}")
        if self.permutations < 20:
            raise ValueError("permutations must be >= 20")
        if self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")


def _as_series(v, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=float).ravel()
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _as_matrix(Z, n: int) -> np.ndarray:
    """Normalize a conditioning set to an (n, dz) matrix; None/empty -> dz = 0.

    Accepts a single series, an (n, dz) matrix, or a sequence of series
    (stacked as rows, i.e. shape (dz, n)); n disambiguates the orientation.
    """
    if Z is None or (hasattr(Z, "__len__") and len(Z) == 0):
        return np.empty((n, 0))
    arr = np.asarray(Z, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim == 2 and arr.shape[0] != n and arr.shape[1] == n:
        arr = arr.T
    if arr.shape[0] != n:
        raise ValueError(
            f"conditioning set has {arr.shape[0]} rows, expected {n}"
        )
    if arr.size and not np.isfinite(arr).all():
        raise ValueError("conditioning set contains non-finite values")
    return arr


def _standardized(v: np.ndarray, name: str) -> np.ndarray:
    sd = v.std(ddof=1) if v.size > 1 else 0.0
    if sd <= 1e-12:
        raise DegenerateDataError(f"{name} has degenerate variance")
    return (v - v.mean()) / sd


# -- ParCorr --------------------------------------------------------------------


def _ols_residuals(v: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Least-squares residuals of v on Z with intercept (pseudo-inverse on
    singular designs, via lstsq)."""
    if Z.shape[1] == 0:
        return v - v.mean()
    design = np.column_stack([np.ones(len(v)), Z])
    beta, *_ = np.linalg.lstsq(design, v, rcond=None)
    return v - design @ beta


def parcorr(x, y, Z=None) -> CITestResult:
    """Partial correlation of x and y given Z.

    Statistic: Pearson correlation of the OLS residuals. Two-sided p-value
    from the t distribution with n - |Z| - 2 degrees of freedom.
    """
    x = _as_series(x, "x")
    y = _as_series(y, "y")
    n = len(x)
    if len(y) != n:
        raise ValueError("series lengths differ")
    Zm = _as_matrix(Z, n)
    dz = Zm.shape[1]
    if n <= dz + 3:
        raise InsufficientDataError(f"need n > |Z| + 3, got n={n}, |Z|={dz}")
    rx = _ols_residuals(x, Zm)
    ry = _ols_residuals(y, Zm)
    sx = np.sqrt(rx @ rx)
    sy = np.sqrt(ry @ ry)
    if sx <= 1e-12 or sy <= 1e-12:
        raise DegenerateDataError("residuals have degenerate variance")
    r = float(np.clip((rx @ ry) / (sx * sy), -1.0, 1.0))
    dof = n - dz - 2
    if 1.0 - r * r < 1e-15:
        return CITestResult(statistic=r, p_value=0.0)
    t = r * np.sqrt(dof / (1.0 - r * r))
    p = float(2.0 * t_dist.sf(abs(t), dof))
    return CITestResult(statistic=r, p_value=min(p, 1.0))


# -- Gaussian-process regression --------------------------------------------------


def _cholesky_with_jitter(K: np.ndarray) -> np.ndarray:
    for jitter in _JITTERS:
        try:
            return np.linalg.cholesky(
                K if jitter == 0.0 else K + jitter * np.eye(K.shape[0])
            )
        except np.linalg.LinAlgError:
            continue
    raise NumericalError("kernel matrix not positive-definite after jitter escalation")


def gp_regress(Z, target) -> np.ndarray:
    """Residuals of the target after a GP fit on Z (inputs standardized).

    Squared-exponential kernel with unit signal variance; length-scale from
    the median pairwise distance of the inputs; noise variance picked from a
    fixed log-grid by marginal likelihood. Empty Z returns the standardized
    target; a constant target returns zeros.
    """
    y = _as_series(target, "target")
    n = len(y)
    sd = y.std(ddof=1) if n > 1 else 0.0
    if sd <= 1e-12:
        return np.zeros(n)
    y = (y - y.mean()) / sd
    Zm = _as_matrix(Z, n)
    if Zm.shape[1] == 0:
        return y

    dists = pdist(Zm)
    scale = float(np.median(dists))
    if scale <= 1e-12:
        scale = 1.0
    sq = np.sum((Zm[:, None, :] - Zm[None, :, :]) ** 2, axis=-1)
    K = np.exp(-0.5 * sq / scale**2)

    best = None
    for noise in _GP_NOISE_GRID:
        L = _cholesky_with_jitter(K + noise * np.eye(n))
        alpha = np.linalg.solve(L.T, np.linalg.solve(L, y))
        lml = (
            -0.5 * (y @ alpha)
            - np.log(np.diag(L)).sum()
            - 0.5 * n * np.log(2.0 * np.pi)
        )
        if best is None or lml > best[0]:
            best = (lml, noise, alpha)
    _, noise, alpha = best
    # y = (K + vI) alpha, so the residual y - K alpha collapses to v * alpha.
    return noise * alpha


# -- Distance correlation ----------------------------------------------------------


def _centered_distances(a: np.ndarray) -> np.ndarray:
    D = np.abs(a[:, None] - a[None, :])
    return D - D.mean(axis=0)[None, :] - D.mean(axis=1)[:, None] + D.mean()


def distance_correlation(a, b) -> float:
    """Distance correlation in [0, 1]; 0 iff empirical distance covariance is 0."""
    a = _as_series(a, "a")
    b = _as_series(b, "b")
    n = len(a)
    if len(b) != n:
        raise ValueError("series lengths differ")
    if n < 10:
        raise InsufficientDataError(f"need n >= 10, got {n}")
    A = _centered_distances(a)
    B = _centered_distances(b)
    dvar_a = (A * A).mean()
    dvar_b = (B * B).mean()
    if dvar_a <= 1e-24 or dvar_b <= 1e-24:
        raise DegenerateDataError("constant series has zero distance variance")
    dcov2 = max((A * B).mean(), 0.0)
    return float(np.sqrt(dcov2 / np.sqrt(dvar_a * dvar_b)))


def gpdc(x, y, Z=None, cfg: CITestConfig | None = None) -> CITestResult:
    """GPDC conditional-independence test.

    Regress x and y on Z with a GP, take the distance correlation of the
    residuals, and compare it against permutations of one residual series:
    p = (1 + #{permuted >= observed}) / (B + 1).
    """
    if cfg is None:
        cfg = CITestConfig(kind="gpdc")
    x = _standardized(_as_series(x, "x"), "x")
    y = _standardized(_as_series(y, "y"), "y")
    if len(y) != len(x):
        raise ValueError("series lengths differ")
    Zm = _as_matrix(Z, len(x))
    if Zm.shape[1]:
        Zm = np.column_stack(
            [_standardized(Zm[:, j], f"Z[{j}]") for j in range(Zm.shape[1])]
        )
    rx = gp_regress(Zm, x)
    ry = gp_regress(Zm, y)
    n = len(rx)
    if n < 10:
        raise InsufficientDataError(f"need n >= 10, got {n}")

    A = _centered_distances(rx)
    B = _centered_distances(ry)
    dvar = np.sqrt((A * A).mean() * (B * B).mean())
    if dvar <= 1e-24:
        raise DegenerateDataError("GP residuals have zero distance variance")
    observed = np.sqrt(max((A * B).mean(), 0.0) / dvar)

    rng = np.random.default_rng(cfg.seed)
    exceed = 0
    for _ in range(cfg.permutations):
        perm = rng.permutation(n)
        stat = np.sqrt(max((A * B[np.ix_(perm, perm)]).mean(), 0.0) / dvar)
        if stat >= observed:
            exceed += 1
    p = (1.0 + exceed) / (cfg.permutations + 1.0)
    return CITestResult(statistic=float(observed), p_value=p)


# -- Kraskov estimators --------------------------------------------------------------


def _count_lt(points: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Neighbours strictly inside each radius under the max-norm (self excluded)."""
    tree = cKDTree(points)
    counts = tree.query_ball_point(
        points, np.nextafter(radii, 0.0), p=np.inf, return_length=True
    )
    return counts - 1


def kraskov_cmi(x, y, Z=None, k: int = 4, seed: int = 0) -> float:
    """KSG estimate of the conditional mutual information I(x; y | Z) in nats.

    Digamma-of-counts form under the max-norm; with empty Z the count in the
    conditioning space is n - 1 for every point, recovering the plain KSG MI
    with its psi(n) term. Duplicate points are broken by a seeded jitter of
    magnitude 1e-10 * std per column.
    """
    x = _as_series(x, "x")
    y = _as_series(y, "y")
    n = len(x)
    if len(y) != n:
        raise ValueError("series lengths differ")
    Zm = _as_matrix(Z, n)
    if not k < n / 2:
        raise ValueError(f"need k < n/2, got k={k}, n={n}")

    joint = np.column_stack([x, y] + ([Zm] if Zm.shape[1] else []))
    scales = joint.std(axis=0)
    scales = np.where(scales > 0.0, scales, 1.0)
    rng = np.random.default_rng(seed)
    joint = joint + rng.standard_normal(joint.shape) * (1e-10 * scales)

    dz = Zm.shape[1]
    eps = cKDTree(joint).query(joint, k=k + 1, p=np.inf)[0][:, k]
    n_xz = _count_lt(joint[:, [0] + list(range(2, 2 + dz))], eps)
    n_yz = _count_lt(joint[:, 1:], eps)
    if dz:
        n_z = _count_lt(joint[:, 2:], eps)
    else:
        n_z = np.full(n, n - 1)
    return float(
        digamma(k)
        + np.mean(digamma(n_z + 1.0) - digamma(n_xz + 1.0) - digamma(n_yz + 1.0))
    )


def transfer_entropy(source, target, lag: int = 1, k: int = 4, seed: int = 0) -> float:
    """Transfer entropy source -> target at the given lag, in nats.

    Computed as the KSG CMI between the target's present and the source's
    past, conditioned on the target's own past.
    """
    source = _as_series(source, "source")
    target = _as_series(target, "target")
    if lag < 1:
        raise ValueError(f"lag must be >= 1, got {lag}")
    n = len(source)
    if len(target) != n:
        raise ValueError("series lengths differ")
    if n <= lag + k:
        raise InsufficientDataError(f"need length > lag + k, got {n}")
    return kraskov_cmi(
        target[lag:], source[: n - lag], target[: n - lag], k=k, seed=seed
    )


# -- Permutation machinery --------------------------------------------------------------


def shuffle_significance(stat_fn, series_to_shuffle, B: int = 100, seed: int = 0) -> float:
    """One-sided shuffle p-value of stat_fn with the +1 correction.

    p = (1 + #{stat_fn(shuffled) >= stat_fn(original)}) / (B + 1), so p is
    never exactly 0 and reaches 1 when every shuffle beats the observation.
    """
    if B < 20:
        raise ValueError("B must be >= 20")
    series = np.asarray(series_to_shuffle)
    observed = stat_fn(series)
    rng = np.random.default_rng(seed)
    exceed = 0
    for _ in range(B):
        if stat_fn(rng.permutation(series)) >= observed:
            exceed += 1
    return (1.0 + exceed) / (B + 1.0)
