"""Carl-type implications between entropy numbers, Lipschitz widths and network errors.

Every rate returned here is defined up to a multiplicative constant: scale
is 1 and ``up_to_constants`` is set. Numeric checks compare exponents and
log powers, never constants.
"""
import logging
import math
from typing import List, Literal, Optional, Sequence, Tuple, Union

from config import LIPWIDTH_CONFIG
from errors import DomainError, InputError, UnsupportedError
from lipbounds import growth_class, phi_gamma_of
from schema import (
    BoundFamily,
    CarlIndex,
    CarlReport,
    CarlViolation,
    ChainResult,
    DoublingReport,
    EntropyProfile,
    GrowthFunction,
    RateFunction,
    RatioBound,
)

logger = logging.getLogger(__name__)

Growth = Union[float, GrowthFunction]


def _phi_at(phi: Growth, n: float) -> float:
    return phi.value(n) if isinstance(phi, GrowthFunction) else float(phi)


def _check_index(n: float, name: str = "n"):
    if n < 2:
        raise InputError(f"Rates are evaluated for {name} >= 2, got {n}")


# ---------------------------------------------------------------------------
# index arithmetic
# ---------------------------------------------------------------------------

def carl_index(m: int, gamma: float, delta: float) -> CarlIndex:
    """m log2(3 gamma / delta): the entropy index controlled by d_m^gamma < delta."""
    if m < 1 or not gamma > 0 or not delta > 0:
        raise InputError(f"carl_index needs m >= 1, gamma > 0, delta > 0, got {m}, {gamma}, {delta}")
    value = m * math.log2(3.0 * gamma / delta)
    degenerate = value <= 0
    if degenerate:
        logger.warning(f"delta = {delta:g} >= 3 gamma: the Carl index is not positive")
    return CarlIndex(value=value, index=math.ceil(value), degenerate=degenerate)


def width_upper_from_entropy_index(n: int, phi: Growth) -> int:
    """n ceil(phi(n) / 2): d_n^{2^phi(n)} <= eps at this index for n past n0(K)."""
    if n < 1:
        raise InputError(f"n must be at least 1, got {n}")
    return n * math.ceil(_phi_at(phi, n) / 2.0)


def zero_width_entropy_decay(n: int, phi: Growth, k: int) -> Tuple[int, float]:
    """
    Entropy bound when d_n^{gamma_n} = 0.

    Returns:
        (n k, 6 * 2^{phi(n) - k}) for k > phi(n)
    """
    value = _phi_at(phi, n)
    if not k > value:
        raise DomainError(f"Need k > phi(n) = {value:g}, got k = {k}")
    return n * k, 6.0 * 2.0 ** (value - k)


def ll1_entropy_index(n: int, phi: Growth, eps: float) -> int:
    """ceil(n (phi(n) + log2(6 / eps))): eps_r <= eps whenever d_n^{gamma_n} < eps / 2."""
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps}")
    return math.ceil(n * (_phi_at(phi, n) + math.log2(6.0 / eps)))


def nn_error_entropy_index(
    n: int,
    wfam: BoundFamily,
    error: float,
    regime: Literal["deep", "shallow"] = "deep",
    c: Optional[float] = None,
) -> Tuple[int, float]:
    """
    Entropy index r with eps_r <= 6 E from a network error E.

    Uses the width index with eps = 6E, so r = ceil(n (phi(n) - log2 E)); n is
    the depth (deep) or the width W (shallow).
    """
    if not error > 0:
        raise DomainError("A zero network error is handled by zero_width_entropy_decay")
    pg = phi_gamma_of(wfam, n, regime, c)
    return ll1_entropy_index(n, pg.phi, 6.0 * error), 6.0 * error


# ---------------------------------------------------------------------------
# rate transfers
# ---------------------------------------------------------------------------

def width_rate_from_entropy(rate: RateFunction, growth: GrowthFunction) -> Tuple[RateFunction, bool]:
    """
    Width rate for gamma_n = 2^phi(n), phi ~ n^p [log2 n]^q.

    polylog and loginv entropy rates give two-sided width rates in n phi(n);
    2^{-c n^a} with a < 1 only gives the upper bound 2^{-c (n phi(n))^a}.

    Returns:
        (rate, two_sided)
    """
    p, q = growth.exponents
    if rate.kind == "polylog":
        if not growth.log_hypothesis:
            raise DomainError(f"phi = {growth.describe()} is not bounded below by c log2 n")
        return RateFunction(kind="polylog", alpha=rate.alpha * (1 + p), beta=rate.beta - rate.alpha * q), True
    if rate.kind == "loginv":
        if not growth.log_hypothesis:
            raise DomainError(f"phi = {growth.describe()} is not bounded below by c log2 n")
        return RateFunction(kind="loginv", alpha=rate.alpha), True
    if rate.b != 0 or rate.a >= 1:
        raise UnsupportedError("Only 2^{-c n^a} with 0 < a < 1 transfers to widths")
    return RateFunction(kind="expo", c=rate.c, a=rate.a * (1 + p), b=rate.a * q), False


def width_lower_from_entropy(rate: RateFunction, phi: GrowthFunction, n: int) -> float:
    """
    Lower bound on d_n^{gamma_n} (up to constants) from an entropy lower bound.

    polylog: [log2(n phi(n))]^beta [n phi(n)]^-alpha; loginv: [log2(n phi(n))]^-alpha.
    """
    if not phi.log_hypothesis:
        raise DomainError(f"phi = {phi.describe()} is not bounded below by c log2 n")
    if rate.kind == "expo":
        raise UnsupportedError("Entropy lower bounds of the form 2^{-c n^a} have no width counterpart")
    x = n * phi.value(n)
    if x <= 1:
        raise DomainError(f"n phi(n) = {x:g} must exceed 1")
    lg = math.log2(x)
    if rate.kind == "polylog":
        return rate.scale * lg ** rate.beta * x ** (-rate.alpha)
    return rate.scale * lg ** (-rate.alpha)


def nn_lower_rate_deep(rate: RateFunction, wfam: BoundFamily) -> RateFunction:
    """Error lower rate in the depth n for parameters bounded by w(n)."""
    if rate.kind == "loginv":
        return RateFunction(kind="loginv", alpha=rate.alpha)
    if rate.kind != "polylog":
        raise UnsupportedError(f"No network lower bound for a {rate.kind} entropy rate")
    if wfam.kind == "polynomial":
        return RateFunction(kind="polylog", alpha=2 * rate.alpha, beta=rate.beta - rate.alpha)
    nu = wfam.nu if wfam.kind == "exponential" else 0.0
    return RateFunction(kind="polylog", alpha=(2 + nu) * rate.alpha, beta=rate.beta)


def nn_lower_rate_shallow(rate: RateFunction, wfam: BoundFamily) -> RateFunction:
    """Error lower rate in the width W for parameters bounded by w(W)."""
    if rate.kind == "loginv":
        return RateFunction(kind="loginv", alpha=rate.alpha)
    if rate.kind != "polylog":
        raise UnsupportedError(f"No network lower bound for a {rate.kind} entropy rate")
    if wfam.kind == "exponential" and wfam.nu > 0:
        return RateFunction(kind="polylog", alpha=(1 + wfam.nu) * rate.alpha, beta=rate.beta)
    return RateFunction(kind="polylog", alpha=rate.alpha, beta=rate.beta - rate.alpha)


def _check_lww(wfam: BoundFamily, n: int, L: Optional[float], W: Optional[int]):
    if L is not None and W is not None and L * W * wfam.value(n) < 2:
        raise DomainError(f"LWw(n) = {L * W * wfam.value(n):g} < 2")


def nn_lower_bound_deep(
    rate: RateFunction,
    wfam: BoundFamily,
    n: int,
    L: Optional[float] = None,
    W: Optional[int] = None,
) -> float:
    _check_index(n)
    _check_lww(wfam, n, L, W)
    return rate.scale * nn_lower_rate_deep(rate, wfam).value(n)


def nn_lower_bound_shallow(rate: RateFunction, wfam: BoundFamily, W: int) -> float:
    _check_index(W, "W")
    if wfam.value(W) < 1:
        raise DomainError("Shallow bounds need w(W) >= 1")
    return rate.scale * nn_lower_rate_shallow(rate, wfam).value(W)


def entropy_upper_from_width(width_rate: RateFunction, p: float, q: float) -> RateFunction:
    """
    Entropy upper rate from a width upper rate with gamma_n = 2^{c n^p [log2 n]^q}.

    polylog(alpha, beta):
        p > 0, or p = 0 and q >= 1: polylog(alpha / (1 + p), beta + alpha q / (1 + p))
        p = 0 and q < 1:            polylog(alpha, alpha + beta)
    2^{-c n}:
        p < 1, or p = 1 and q <= 0: 2^{-c sqrt(n)}
        p > 1, or p = 1 and q > 0:  2^{-c n^{1/(p+1)} [log2 n]^{-q/(p+1)}}
    """
    if p < 0:
        raise UnsupportedError(f"p must be nonnegative, got {p}")
    if width_rate.kind == "polylog":
        a, b = width_rate.alpha, width_rate.beta
        if p > 0 or q >= 1:
            return RateFunction(kind="polylog", alpha=a / (1 + p), beta=b + a * q / (1 + p))
        return RateFunction(kind="polylog", alpha=a, beta=a + b)
    if width_rate.kind == "expo" and width_rate.a == 1 and width_rate.b == 0:
        if p < 1 or (p == 1 and q <= 0):
            return RateFunction(kind="expo", c=width_rate.c, a=0.5, b=0.0)
        return RateFunction(kind="expo", c=width_rate.c, a=1.0 / (p + 1), b=-q / (p + 1))
    raise UnsupportedError(f"No entropy bound from a width rate {width_rate.describe()}")


def entropy_upper_from_nn_error(
    err_rate: RateFunction,
    wfam: BoundFamily,
    regime: Literal["deep", "shallow"],
    c: Optional[float] = None,
) -> RateFunction:
    """Entropy upper rate from a network error rate, through phi of the bound family."""
    p, q = growth_class(wfam, regime, c).exponents
    return entropy_upper_from_width(err_rate, p, q)


# ---------------------------------------------------------------------------
# consistency and auxiliary bounds
# ---------------------------------------------------------------------------

def _smallest_delta(m: int, gamma: float, u: float, k: int) -> float:
    # smallest delta > u whose Carl index m log2(3 gamma / delta) is at most k
    return max(u * (1 + 1e-12) if u > 0 else 0.0, 3.0 * gamma * 2.0 ** (-k / m))


def check_carl_consistency(
    entropy: EntropyProfile,
    widths: Sequence[Tuple[int, float, float]],
) -> CarlReport:
    """
    Check entropy lower bounds against width upper bounds.

    For each width (m, gamma, u) and each profile index k >= 1, the smallest
    admissible delta > u with m log2(3 gamma / delta) <= k must satisfy
    lower(k) < 2 delta; anything else is a solver bug.
    """
    violations: List[CarlViolation] = []
    checked = 0
    starved = False
    indices = [b.n for b in entropy.brackets if b.n >= 1]
    for m, gamma, u in widths:
        if m < 1 or not gamma > 0 or u < 0:
            raise InputError(f"Bad width entry ({m}, {gamma}, {u})")
        used = 0
        for k in indices:
            lower = entropy.lower_at(k)
            if lower is None or lower <= 0:
                continue
            delta = _smallest_delta(m, gamma, u, k)
            used += 1
            if lower >= 2.0 * delta:
                violations.append(CarlViolation(
                    m=m, gamma=gamma, width_upper=u, k=k, delta=delta, entropy_lower=lower,
                ))
        checked += used
        starved = starved or used == 0
    partial = checked == 0 or len(entropy.brackets) < 2 or starved
    if violations:
        logger.warning(f"{len(violations)} Carl-inequality violations in {entropy.label}")
    return CarlReport(checked=checked, violations=violations, partial=partial)


def carl_width_lower(entropy: EntropyProfile, m: int, gamma: float) -> float:
    """
    Lower bound on d_m^gamma from entropy lower bounds.

    Any delta in [3 gamma 2^{-k/m}, lower(k) / 2) would contradict the Carl
    inequality, so d_m^gamma >= lower(k) / 2 whenever that interval is nonempty.
    """
    best = 0.0
    for b in entropy.brackets:
        if b.n < 1:
            continue
        lower = entropy.lower_at(b.n) or 0.0
        if lower / 2.0 > 3.0 * gamma * 2.0 ** (-b.n / m):
            best = max(best, lower / 2.0)
    return best


def doubling_sup(phi: GrowthFunction, c: float = 2.0, N: int = 1024) -> DoublingReport:
    """max over 2 <= n <= N of phi(c n) / phi(n), with the analytic finiteness of sup over all n."""
    if N < 2 or not c > 1:
        raise InputError(f"doubling_sup needs N >= 2 and c > 1, got {N}, {c}")
    best, argmax = 0.0, 0
    for n in range(2, N + 1):
        x = c * n
        if phi.kind == "tabulated" and (x != int(x) or x > len(phi.values)):
            continue
        base = phi.value(n)
        if base <= 0:
            continue
        ratio = phi.value(x) / base
        if ratio > best:
            best, argmax = ratio, n
    classification = "unknown" if phi.kind == "tabulated" else "finite"
    return DoublingReport(sup=best, argmax=argmax, classification=classification)


def ratio_divergence_bound(alpha: float, beta: float, phi: GrowthFunction, n: int, c: float = 8.0) -> RatioBound:
    """Lower bound [r]^alpha [log2 r]^-beta (beta > 0) or r^alpha on the width gap, r = phi(c n) / phi(n)."""
    _check_index(n)
    if not alpha > 0:
        raise InputError(f"alpha must be positive, got {alpha}")
    base = phi.value(n)
    ratio = phi.value(c * n) / base if base > 0 else math.inf
    if not ratio > 1 or math.isinf(ratio):
        return RatioBound(value=None, ratio=ratio, degenerate=True)
    value = ratio ** alpha
    if beta > 0:
        value *= math.log2(ratio) ** (-beta)
    return RatioBound(value=value, ratio=ratio, degenerate=False)


def const_gamma_chain(
    kind: Literal["expo2", "poly"],
    n: int,
    alpha: float = 1.0,
    c: float = 1.0,
    c1: float = 1.0,
) -> ChainResult:
    """
    Entropy index c ceil(n log2(1 / xi_n)) and constant c1 xi_n^-c for a constant-gamma width.

    expo2: xi_n = 2^-n, index c n^2, gamma c1 2^{c n}.
    poly:  xi_n = n^-alpha, index c ceil(alpha n log2 n), gamma c1 n^{c alpha}.
    """
    _check_index(n)
    if kind == "expo2":
        return ChainResult(entropy_index=math.ceil(c * n * n), gamma=c1 * 2.0 ** (c * n), degenerate=False)
    if kind != "poly":
        raise InputError(f"Unsupported chain kind: {kind}")
    if alpha <= 0:
        logger.warning("xi_n = n^0 is constant: the chain carries no information")
        return ChainResult(entropy_index=0, gamma=None, degenerate=True)
    index = math.ceil(c * math.ceil(alpha * n * math.log2(n)))
    return ChainResult(entropy_index=index, gamma=c1 * n ** (c * alpha), degenerate=False)


def default_gamma_constant() -> float:
    return LIPWIDTH_CONFIG["gamma_constant"]
