"""Acceptance suite: each criterion recomputes one checkable consequence of the theory."""
import json
import logging
import math
import os
import time
from typing import Callable, List, Optional, Tuple

import numpy as np

from carl import entropy_upper_from_nn_error
from config import LIPWIDTH_CONFIG, SUITE_CONFIG
from corpus import build_corpus, check_corpus
from entropy import (
    cover_from_lipschitz,
    covering_number,
    covering_number_exhaustive,
    entropy_number,
    lipschitz_cover_size_bound,
)
from lipbounds import certificate_for, empirical_lipschitz, growth_class, phi_gamma_of
from network import evaluate
from schema import (
    Activation,
    BoundFamily,
    CriterionResult,
    Norm,
    PointCloudSet,
    RateFunction,
    SuiteReport,
    TakagiSpec,
)
from spaces import pairwise_distances, sigma_set, uniform_interval
from takagi import build_takagi_network, coefficient_family, psi, tail_bound

logger = logging.getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")

Check = Callable[[], Tuple[bool, str]]


def _load(name: str) -> dict:
    with open(os.path.join(DATA_DIR, name), "r", encoding="utf-8") as f:
        return json.load(f)


def _takagi_coefficients(lam: float, n: int, corrupt: bool) -> List[float]:
    coefficients = TakagiSpec(lam=lam, n_terms=n).coefficients
    if corrupt:
        coefficients = [coefficients[0] * 1.01] + list(coefficients[1:])
    return coefficients


def takagi_identity(sizes: dict, corrupt: bool = False) -> Tuple[bool, str]:
    t = np.linspace(0.0, 1.0, 4097)
    reference = t * (1.0 - t)
    slack = 16.0 * np.finfo(float).eps * float(np.max(reference))
    worst = []
    for n in range(1, sizes["takagi_n_max"] + 1):
        spec = TakagiSpec(coefficients=_takagi_coefficients(4.0, n, corrupt))
        error = float(np.max(np.abs(psi(spec, t) - reference)))
        if error > tail_bound(4.0, n) + slack:
            worst.append(n)
    if worst:
        return False, f"error above 4^-n / 3 for n in {worst}"
    return True, f"n = 1 .. {sizes['takagi_n_max']}"


def network_matches_sum(sizes: dict, corrupt: bool = False) -> Tuple[bool, str]:
    t = np.linspace(0.0, 1.0, 4097)
    bounds = set()
    worst = 0.0
    for lam in (2.0, 4.0):
        for n in range(1, sizes["network_n_max"] + 1):
            exact = TakagiSpec(lam=lam, n_terms=n)
            net, w = build_takagi_network(TakagiSpec(coefficients=_takagi_coefficients(lam, n, corrupt)))
            worst = max(worst, float(np.max(np.abs(evaluate(net, t) - psi(exact, t)))))
            bounds.add(w)
    if worst > 1e-10:
        return False, f"network differs from psi by {worst:.3g}"
    if len(bounds) != 1:
        return False, f"parameter bound varies with n: {sorted(bounds)}"
    return True, f"max deviation {worst:.3g}, w = {bounds.pop():g}"


def lipschitz_sandwich(sizes: dict, seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    acts = [Activation(kind="relu"), Activation(kind="sigmoidal", L=1.0)]
    violations = []
    for i in range(sizes["lipschitz_configs"]):
        W = int(rng.integers(2, 5))
        n = int(rng.integers(1, 6))
        w = float(rng.choice([1.0, 2.0]))
        act = acts[i % 2]
        cert = certificate_for(act, 1, W, w, n)
        emp = empirical_lipschitz((1, W, n), act, w, sizes["lipschitz_trials"], seed=seed + i)
        if emp > cert.value * (1 + 1e-9) or cert.value > cert.closed_form * (1 + 1e-12):
            violations.append((act.kind, W, n, w))
    if violations:
        return False, f"violations: {violations}"
    return True, f"{sizes['lipschitz_configs']} configurations"


def dyadic_entropy(sizes: dict) -> Tuple[bool, str]:
    K = uniform_interval(sizes["dyadic_points"])
    for n in range(sizes["dyadic_n_max"] + 1):
        target = 2.0 ** (-(n + 1))
        b = entropy_number(K, n)
        if not b.lower <= target * (1 + 1e-12) or not target <= b.upper * (1 + 1e-12):
            return False, f"eps_{n} bracket [{b.lower:.9g}, {b.upper:.9g}] misses {target:g}"
        if b.upper - b.lower > 1e-4:
            return False, f"eps_{n} bracket wider than 1e-4"
    return True, f"n = 0 .. {sizes['dyadic_n_max']} on {K.size} points"


def sigma_rate(sizes: dict) -> Tuple[bool, str]:
    lows, highs = [], []
    for J in sizes["sigma_truncations"]:
        K = sigma_set(J)
        for n in range(1, 6):
            if 2 ** n >= J + 1:
                continue
            b = entropy_number(K, n)
            lows.append(n * b.lower)
            highs.append(n * b.upper)
    c1, c2 = min(lows), max(highs)
    if not c1 > 0 or c2 / c1 > 8:
        return False, f"n eps_n ranges over [{c1:.4g}, {c2:.4g}]"
    return True, f"c1 = {c1:.4g}, c2 = {c2:.4g}"


def constructive_cover(sizes: dict) -> Tuple[bool, str]:
    par = coefficient_family(3, 257)
    counts = []
    for eps in (0.5, 0.25):
        cover = cover_from_lipschitz(par.images, par.gamma, 3, eps, par.norm, batched=True)
        bound, _ = lipschitz_cover_size_bound(par.gamma, eps, 3)
        if not cover.verified or cover.size > bound:
            return False, f"cover of size {cover.size} at eps={eps}, bound {bound}"
        counts.append(cover.size)
    return True, f"cover sizes {counts}"


def carl_corpus(quick: bool, seed: int) -> Tuple[bool, str]:
    reports = check_corpus(build_corpus(quick, seed))
    bad = {label: len(r.violations) for label, r in reports.items() if not r.ok}
    if bad:
        return False, f"violations: {bad}"
    return True, ", ".join(f"{label}: {r.checked}" for label, r in reports.items())


def table_rows() -> Tuple[bool, str]:
    rows = _load("growth_tables.json")["rows"]
    for row in rows:
        wfam = BoundFamily(**row["w"])
        growth = growth_class(wfam, row["regime"])
        if growth.exponents != (row["p"], row["q"]):
            return False, f"{row['source']} {row['regime']} {wfam.kind}: got {growth.exponents}"
        ratios = []
        for n in (2 ** 8, 2 ** 12, 2 ** 16):
            phi = phi_gamma_of(wfam, n, row["regime"]).phi
            ratios.append(phi / (n ** row["p"] * math.log2(n) ** row["q"]))
        if max(ratios) > 2 * min(ratios):
            return False, f"{row['source']} {row['regime']} {wfam.kind}: phi drifts from its class ({ratios})"
    return True, f"{len(rows)} rows"


def _same_rate(got: RateFunction, expected: RateFunction) -> bool:
    if got.kind != expected.kind:
        return False
    if got.kind == "expo":
        return math.isclose(got.a, expected.a, abs_tol=1e-12) and math.isclose(got.b, expected.b, abs_tol=1e-12)
    return math.isclose(got.alpha, expected.alpha, abs_tol=1e-12) and math.isclose(got.beta, expected.beta, abs_tol=1e-12)


def rate_round_trips() -> Tuple[bool, str]:
    rows = _load("nn_entropy_rates.json")["rows"]
    for row in rows:
        got = entropy_upper_from_nn_error(
            RateFunction(**row["error"]), BoundFamily(**row["w"]), row["regime"]
        )
        if not _same_rate(got, RateFunction(**row["expected"])):
            return False, f"{row['source']} {row['claim']}: got {got.describe()}"
    return True, f"{len(rows)} combinations"


def oracle_equivalence(sizes: dict, seed: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(seed)
    mismatches = 0
    for _ in range(sizes["oracle_clouds"]):
        size = int(rng.integers(2, 11))
        dim = int(rng.integers(1, 4))
        p = float(rng.choice([1.0, 2.0, math.inf]))
        K = PointCloudSet(points=rng.uniform(0.0, 1.0, size=(size, dim)), norm=Norm.lp(p, dim))
        dist = pairwise_distances(K.points, K.points, K.norm)
        eps = float(rng.uniform(0.05, 0.6)) * float(np.max(dist))
        if covering_number(K, eps, "exact") != covering_number_exhaustive(K, eps):
            mismatches += 1
    if mismatches:
        return False, f"{mismatches} of {sizes['oracle_clouds']} clouds disagree"
    return True, f"{sizes['oracle_clouds']} clouds"


def _run(cid: int, name: str, check: Check) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, detail = check()
    except ValueError as e:
        passed, detail = False, f"{type(e).__name__}: {e}"
    seconds = time.perf_counter() - start
    level = logging.INFO if passed else logging.ERROR
    logger.log(level, f"[{cid}] {name}: {'pass' if passed else 'FAIL'} ({seconds:.2f}s) {detail}")
    return CriterionResult(id=cid, name=name, passed=passed, detail=detail, seconds=seconds)


def run_acceptance_suite(quick: bool = False, corrupt_takagi: bool = False, seed: Optional[int] = None) -> SuiteReport:
    """
    Run every acceptance criterion and collect pass/fail per criterion.

    Args:
        quick: use the trimmed sizes of SUITE_CONFIG["quick"]
        corrupt_takagi: perturb the first Takagi coefficient, for fault injection
        seed: seed of the random configurations and clouds

    Returns:
        SuiteReport: one CriterionResult per criterion
    """
    sizes = SUITE_CONFIG["quick" if quick else "full"]
    seed = LIPWIDTH_CONFIG["seed"] if seed is None else seed
    checks = [
        ("takagi identity", lambda: takagi_identity(sizes, corrupt_takagi)),
        ("network equals sum", lambda: network_matches_sum(sizes, corrupt_takagi)),
        ("lipschitz sandwich", lambda: lipschitz_sandwich(sizes, seed)),
        ("dyadic entropy", lambda: dyadic_entropy(sizes)),
        ("sigma rate", lambda: sigma_rate(sizes)),
        ("constructive cover", lambda: constructive_cover(sizes)),
        ("carl consistency", lambda: carl_corpus(quick, seed)),
        ("table reproduction", table_rows),
        ("rate round trips", rate_round_trips),
        ("oracle equivalence", lambda: oracle_equivalence(sizes, seed)),
    ]
    results = [_run(i, name, check) for i, (name, check) in enumerate(checks, start=1)]
    return SuiteReport(quick=quick, criteria=results)
