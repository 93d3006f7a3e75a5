"""Time-series causal discovery: PCMCI and F-PCMCI.

PCMCI runs in two stages: per-target condition selection (iteratively
prunes lagged candidate parents with CI tests of growing condition
dimension) followed by momentary conditional-independence tests of every
lagged pair given the parents of both endpoints. F-PCMCI first restricts
the candidate links with a transfer-entropy relevance screen.

Both entry points are deterministic functions of (batch, config): every
CI test draws its permutation seed from the config seed and the test's
(stage, target, source, lag) coordinates, so results are independent of
evaluation order.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .causalgraph import CausalGraph, LaggedEdge
from .citest import (
    CI_TEST_KINDS,
    CITestConfig,
    CITestResult,
    gpdc,
    kraskov_cmi,
    parcorr,
    shuffle_significance,
)
from .errors import InsufficientDataError
from .timeseries import TimeSeriesBatch, standardize

logger = logging.getLogger(__name__)

_STAGE_PC, _STAGE_MCI, _STAGE_TE = 1, 2, 3

DISCOVERY_METHODS = ("pcmci", "fpcmci")


@dataclass(frozen=True)
class DiscoveryConfig:
    """All discovery tunables; alpha and tau_max mirror the scenario setup."""

    method: str = "pcmci"
    citest: CITestConfig = field(default_factory=CITestConfig)
    alpha: float = 0.05
    tau_max: int = 1
    pc_alpha: float = 0.05
    max_combinations: int = 1
    # The condition-selection stage defaults to ParCorr even under a GPDC
    # MCI stage (speed/robustness trade-off); set to "gpdc" to force GPDC
    # everywhere.
    pc_stage_test: str = "parcorr"
    te_k: int = 4
    te_shuffles: int = 100
    te_alpha: float = 0.05

    def __post_init__(self):
        if self.method not in DISCOVERY_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.pc_stage_test not in CI_TEST_KINDS:
            raise ValueError(f"unknown pc_stage_test {self.pc_stage_test!r}")
        for name in ("alpha", "pc_alpha", "te_alpha"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {v}")
        if self.tau_max < 1:
            raise ValueError("tau_max must be >= 1")
        if self.max_combinations < 1:
            raise ValueError("max_combinations must be >= 1")
        if self.te_k < 1:
            raise ValueError("te_k must be >= 1")
        if self.te_shuffles < 20:
            raise ValueError("te_shuffles must be >= 20")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DiscoveryConfig":
        d = dict(d)
        ci = d.pop("citest", {})
        return cls(citest=CITestConfig(**ci), **d)


@dataclass(frozen=True)
class ParentSet:
    """Ranked lagged parents per target: (source, lag, selection statistic)."""

    parents: dict[str, tuple[tuple[str, int, float], ...]]

    def lagged(self, target: str) -> list[tuple[str, int]]:
        return [(src, lag) for src, lag, _ in self.parents[target]]


def _derive_seed(base: int, *key: int) -> int:
    """Stable per-test seed from the config seed and test coordinates."""
    entropy = [base & 0xFFFFFFFF, *key]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def _lagged_cols(vals: np.ndarray, pairs, offset: int) -> list[np.ndarray]:
    n = vals.shape[0]
    return [vals[offset - tau : n - tau, var] for var, tau in pairs]


def _run_ci(x, y, zcols, kind: str, cfg: DiscoveryConfig, seed: int) -> CITestResult:
    Z = np.column_stack(zcols) if zcols else None
    if kind == "parcorr":
        return parcorr(x, y, Z)
    return gpdc(x, y, Z, replace(cfg.citest, kind="gpdc", seed=seed))


def _cross_allowed(names, i: int, j: int, allowed) -> bool:
    return i == j or allowed is None or (names[i], names[j]) in allowed


# -- condition selection (PC1) ---------------------------------------------------


def pc1_condition_selection(
    batch: TimeSeriesBatch,
    cfg: DiscoveryConfig,
    allowed_pairs: set[tuple[str, str]] | None = None,
) -> ParentSet:
    """Select ranked lagged parents per target variable.

    Starts from all (source, lag) candidates (restricted to allowed_pairs
    when given; autodependencies always stay in). At condition dimension q
    each surviving candidate is tested against the target given the q
    strongest other survivors (up to max_combinations subsets); candidates
    with p > pc_alpha drop out, survivors are re-ranked by the smallest
    absolute statistic seen, and q grows until no candidate is removed or
    q exceeds the survivor count - 1.
    """
    b = standardize(batch)
    names = b.variables
    vals = b.values
    n, N = vals.shape
    if n <= 10 * cfg.tau_max * N:
        raise InsufficientDataError(
            f"need more than {10 * cfg.tau_max * N} rows for "
            f"{N} variables at tau_max={cfg.tau_max}, got {n}"
        )
    offset = cfg.tau_max

    parents: dict[str, tuple[tuple[str, int, float], ...]] = {}
    for j in range(N):
        y = vals[offset:, j]
        candidates = [
            (i, tau)
            for i in range(N)
            for tau in range(1, cfg.tau_max + 1)
            if _cross_allowed(names, i, j, allowed_pairs)
        ]
        val_min: dict[tuple[int, int], float] = {}
        survivors = list(candidates)
        q = 0
        while q <= len(survivors) - 1:
            ranked = survivors
            removed: set[tuple[int, int]] = set()
            for cand in ranked:
                others = [c for c in ranked if c != cand]
                dependent = True
                for conds in itertools.islice(
                    itertools.combinations(others, q), cfg.max_combinations
                ):
                    x = _lagged_cols(vals, [cand], offset)[0]
                    zcols = _lagged_cols(vals, list(conds), offset)
                    seed = _derive_seed(
                        cfg.citest.seed, _STAGE_PC, j, cand[0], cand[1], q
                    )
                    res = _run_ci(x, y, zcols, cfg.pc_stage_test, cfg, seed)
                    val_min[cand] = min(abs(res.statistic), val_min.get(cand, np.inf))
                    if res.p_value > cfg.pc_alpha:
                        dependent = False
                        break
                if not dependent:
                    removed.add(cand)
            for cand in removed:
                val_min.pop(cand, None)
            survivors = sorted(
                (c for c in survivors if c not in removed),
                key=lambda c: -val_min[c],
            )
            if not removed:
                break
            q += 1
        parents[names[j]] = tuple(
            (names[i], tau, val_min[(i, tau)]) for i, tau in survivors
        )
    return ParentSet(parents)


# -- momentary conditional independence -------------------------------------------


def mci(
    batch: TimeSeriesBatch,
    parents: ParentSet,
    cfg: DiscoveryConfig,
    allowed_pairs: set[tuple[str, str]] | None = None,
) -> CausalGraph:
    """MCI stage: test every lagged pair given the parents of both endpoints.

    For candidate link (i, tau) -> j the condition set is parents(j) minus
    the candidate plus parents(i) shifted by tau. Links with p <= alpha
    become edges carrying the test statistic as strength.
    """
    b = standardize(batch)
    names = b.variables
    vals = b.values
    n, N = vals.shape
    offset = 2 * cfg.tau_max
    if n <= offset + 10:
        raise InsufficientDataError(f"need more than {offset + 10} rows, got {n}")
    idx = {name: k for k, name in enumerate(names)}

    edges = []
    for j in range(N):
        y = vals[offset:, j]
        conds_y = [(idx[s], lag) for s, lag in parents.lagged(names[j])]
        for i in range(N):
            if not _cross_allowed(names, i, j, allowed_pairs):
                continue
            conds_x = [(idx[s], lag) for s, lag in parents.lagged(names[i])]
            for tau in range(1, cfg.tau_max + 1):
                z_pairs = [c for c in conds_y if c != (i, tau)]
                for src, lag in conds_x:
                    shifted = (src, lag + tau)
                    if shifted not in z_pairs:
                        z_pairs.append(shifted)
                x = vals[offset - tau : n - tau, i]
                zcols = _lagged_cols(vals, z_pairs, offset)
                seed = _derive_seed(cfg.citest.seed, _STAGE_MCI, j, i, tau)
                res = _run_ci(x, y, zcols, cfg.citest.kind, cfg, seed)
                if res.p_value <= cfg.alpha:
                    edges.append(
                        LaggedEdge(
                            names[i], names[j], tau, res.statistic, res.p_value
                        )
                    )
    return CausalGraph(names, cfg.tau_max, tuple(edges))


# -- transfer-entropy screening ------------------------------------------------------


def te_feature_selection(
    batch: TimeSeriesBatch, cfg: DiscoveryConfig
) -> set[tuple[str, str]]:
    """Retain (source, target) pairs with significant transfer entropy.

    Every ordered cross pair is screened at each lag up to tau_max with a
    shuffle test on the lagged source; a pair stays once any lag passes at
    te_alpha. Self-pairs are always retained.
    """
    b = standardize(batch)
    names = b.variables
    vals = b.values
    n, N = vals.shape
    retained = {(name, name) for name in names}
    for i in range(N):
        for j in range(N):
            if i == j:
                continue
            for tau in range(1, cfg.tau_max + 1):
                if n <= tau + cfg.te_k:
                    raise InsufficientDataError(
                        f"need more than {tau + cfg.te_k} rows, got {n}"
                    )
                y_t = vals[tau:, j]
                src_past = vals[: n - tau, i]
                tgt_past = vals[: n - tau, j]
                jitter_seed = _derive_seed(cfg.citest.seed, _STAGE_TE, j, i, tau, 0)
                shuffle_seed = _derive_seed(cfg.citest.seed, _STAGE_TE, j, i, tau, 1)

                def te_stat(src, y_t=y_t, tgt_past=tgt_past, seed=jitter_seed):
                    return kraskov_cmi(y_t, src, tgt_past, k=cfg.te_k, seed=seed)

                p = shuffle_significance(
                    te_stat, src_past, B=cfg.te_shuffles, seed=shuffle_seed
                )
                if p <= cfg.te_alpha:
                    retained.add((names[i], names[j]))
                    break
    return retained


# -- entry points ----------------------------------------------------------------------


def run_pcmci(batch: TimeSeriesBatch, cfg: DiscoveryConfig) -> CausalGraph:
    """Standardize, select conditions, run MCI; deterministic given (batch, cfg)."""
    t0 = time.perf_counter()
    parents = pc1_condition_selection(batch, cfg)
    t1 = time.perf_counter()
    logger.info("pc1 condition selection: %.3f s", t1 - t0)
    graph = mci(batch, parents, cfg)
    logger.info("mci stage: %.3f s", time.perf_counter() - t1)
    return graph


def run_fpcmci(batch: TimeSeriesBatch, cfg: DiscoveryConfig) -> CausalGraph:
    """PCMCI restricted to transfer-entropy-relevant links.

    Pairs rejected by the screen are never tested, so the output cannot
    contain a cross-edge outside the retained set. Variables with no
    retained pair keep only their autodependency candidates.
    """
    t0 = time.perf_counter()
    retained = te_feature_selection(batch, cfg)
    t1 = time.perf_counter()
    logger.info("transfer-entropy selection: %.3f s", t1 - t0)
    parents = pc1_condition_selection(batch, cfg, allowed_pairs=retained)
    t2 = time.perf_counter()
    logger.info("pc1 condition selection: %.3f s", t2 - t1)
    graph = mci(batch, parents, cfg, allowed_pairs=retained)
    logger.info("mci stage: %.3f s", time.perf_counter() - t2)
    return graph


def run_discovery(batch: TimeSeriesBatch, cfg: DiscoveryConfig) -> CausalGraph:
    """Dispatch on cfg.method."""
    if cfg.method == "pcmci":
        return run_pcmci(batch, cfg)
    return run_fpcmci(batch, cfg)
