"""Covering numbers, entropy numbers and packing bounds of finite point sets."""
import logging
import math
from typing import Callable, Iterator, List, Literal, Optional, Tuple

import numpy as np

from config import LIPWIDTH_CONFIG
from errors import CapacityError, InputError, InvalidCertificateError
from schema import Cover, EntropyBracket, EntropyProfile, Norm, PointCloudSet
from spaces import (
    chebyshev_radius,
    diameter,
    distances_to,
    linf_ball_lattice,
    midpoints,
    nearest_distances,
    pairwise_distances,
)

logger = logging.getLogger(__name__)

Mode = Literal["exact", "greedy", "auto"]


# ---------------------------------------------------------------------------
# set cover over bitmasks
# ---------------------------------------------------------------------------

def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask_of(flags: np.ndarray) -> int:
    mask = 0
    for i in np.flatnonzero(flags):
        mask |= 1 << int(i)
    return mask


def min_set_cover(masks: List[int], universe: int, limit: Optional[int] = None) -> Tuple[int, List[int]]:
    """
    Minimum set cover over bitmasks by branch and bound.

    Duplicate and dominated sets are dropped, a greedy cover seeds the
    incumbent, branching is on the uncovered element with the fewest
    covering sets, and nodes are pruned with the ceil(remaining / largest gain)
    bound.

    Args:
        masks: candidate sets as bitmasks over the universe
        universe: bitmask of the elements to cover
        limit: stop at the first cover of at most this many sets

    Returns:
        (size, indices into masks). With a limit and no cover within it, the
        greedy cover is returned; its size only certifies "more than limit".
    """
    if universe == 0:
        return 0, []
    union = 0
    for m in masks:
        union |= m
    if union & universe != universe:
        raise InputError("The candidate sets do not cover every point")

    kept: List[int] = []
    seen = set()
    for i in sorted(range(len(masks)), key=lambda k: (masks[k] & universe).bit_count(), reverse=True):
        m = masks[i] & universe
        if m == 0 or m in seen:
            continue
        if any(m | masks[k] == masks[k] & universe for k in kept):
            continue
        seen.add(m)
        kept.append(i)

    covered = 0
    greedy: List[int] = []
    while covered != universe:
        pick = max(kept, key=lambda k: (masks[k] & ~covered).bit_count())
        greedy.append(pick)
        covered |= masks[pick]
    if limit is not None and len(greedy) <= limit:
        return len(greedy), greedy

    bound = len(greedy) if limit is None else min(len(greedy), limit + 1)
    by_element = {e: [k for k in kept if masks[k] >> e & 1] for e in _bits(universe)}
    found: Optional[List[int]] = None

    def search(covered: int, picked: List[int]):
        nonlocal bound, found
        remaining = universe & ~covered
        if not remaining:
            found = list(picked)
            bound = len(picked)
            return
        gain = max((masks[k] & remaining).bit_count() for k in kept)
        if len(picked) + -(-remaining.bit_count() // gain) >= bound:
            return
        element = min(_bits(remaining), key=lambda e: (len(by_element[e]), e))
        for k in by_element[element]:
            picked.append(k)
            search(covered | masks[k], picked)
            picked.pop()
            if limit is not None and bound <= limit:
                return

    search(0, [])
    if found is None:
        return len(greedy), greedy
    return len(found), found


def _maximal_cliques(adjacency: List[int]) -> List[int]:
    """Bron-Kerbosch with pivoting on bitmask adjacency lists."""
    cliques: List[int] = []

    def expand(r: int, p: int, x: int):
        if not p and not x:
            cliques.append(r)
            return
        pivot = max(_bits(p | x), key=lambda u: (adjacency[u] & p).bit_count())
        for v in list(_bits(p & ~adjacency[pivot])):
            expand(r | 1 << v, p & adjacency[v], x & adjacency[v])
            p &= ~(1 << v)
            x |= 1 << v

    expand(0, (1 << len(adjacency)) - 1, 0)
    return cliques


def _greedy_cover(member: np.ndarray, limit: Optional[int] = None) -> List[int]:
    """Chvatal greedy over a (candidates, points) membership matrix."""
    covered = np.zeros(member.shape[1], dtype=bool)
    chosen: List[int] = []
    while not covered.all():
        gains = (member & ~covered).sum(axis=1)
        pick = int(np.argmax(gains))
        if gains[pick] == 0:
            raise InputError("The candidate sets do not cover every point")
        chosen.append(pick)
        covered |= member[pick]
        if limit is not None and len(chosen) > limit:
            break
    return chosen


# ---------------------------------------------------------------------------
# covering solver
# ---------------------------------------------------------------------------

class _CoverSolver:
    """Per-set precomputation shared by the covering and bisection routines."""

    def __init__(self, K: PointCloudSet, mode: Mode = "exact"):
        cap = LIPWIDTH_CONFIG["exact_cover_cap"]
        self.K = K
        self.pts = K.points
        self.nrm = K.norm
        self.line = K.dimension == 1
        if mode == "auto":
            mode = "exact" if self.line or K.size <= cap else "greedy"
        if mode not in ("exact", "greedy"):
            raise InputError(f"Unsupported covering mode: {mode}")
        if mode == "exact" and not self.line and K.size > cap:
            raise CapacityError(
                f"Exact covering of {K.size} points exceeds the cap {cap}; use greedy mode"
            )
        self.mode = mode
        if self.line:
            self.sorted = np.sort(self.pts[:, 0])
            return
        if mode == "greedy":
            logger.warning(f"Greedy covering of {K.size} points: within a factor ln|K| + 1 of optimal")
        if self.nrm.is_sup:
            self.pair = pairwise_distances(self.pts, self.pts, self.nrm)
            return
        if mode == "exact":
            self.pair = pairwise_distances(self.pts, self.pts, self.nrm)
        self.candidates = self.pts
        if 1 < K.size <= LIPWIDTH_CONFIG["midpoint_candidate_cap"]:
            self.candidates = np.vstack([self.pts, midpoints(self.pts)])
        self.cand_dist = pairwise_distances(self.candidates, self.pts, self.nrm)

    @property
    def method(self) -> str:
        if self.line or (self.mode == "exact" and self.nrm.is_sup):
            return "exact"
        return "exact-candidates" if self.mode == "exact" else "greedy"

    @property
    def universe(self) -> int:
        return (1 << self.K.size) - 1

    def _sweep(self, eps: float, limit: Optional[int]) -> np.ndarray:
        # leftmost uncovered point sits on the left edge of the next ball
        x = self.sorted
        centers = []
        i = 0
        while i < x.size:
            c = x[i] + eps
            while abs(x[i] - c) > eps:
                c = np.nextafter(c, x[i])
            j = int(np.searchsorted(x, c + eps, side="right"))
            while j > i + 1 and abs(x[j - 1] - c) > eps:
                j -= 1
            while j < x.size and abs(x[j] - c) <= eps:
                j += 1
            centers.append(c)
            i = j
            if limit is not None and len(centers) > limit:
                break
        return np.asarray(centers, dtype=float)[:, None]

    def _adjacency(self, eps: float) -> List[int]:
        close = self.pair <= 2 * eps
        np.fill_diagonal(close, False)
        return [_mask_of(row) for row in close]

    def _clique_sets(self, eps: float) -> Tuple[List[int], np.ndarray]:
        masks = []
        centers = []
        for clique in _maximal_cliques(self._adjacency(eps)):
            members = self.pts[list(_bits(clique))]
            center = (members.min(axis=0) + members.max(axis=0)) / 2.0
            covered = distances_to(self.pts, center, self.nrm) <= eps
            if covered.any():
                masks.append(_mask_of(covered))
                centers.append(center)
        # singletons keep the family a cover when rounding drops a member
        for i in range(self.K.size):
            masks.append(1 << i)
            centers.append(self.pts[i])
        return masks, np.asarray(centers)

    def _grown_sets(self, eps: float) -> Tuple[np.ndarray, np.ndarray]:
        centers = []
        for p in range(self.K.size):
            lo = self.pts[p].copy()
            hi = lo.copy()
            for q in np.argsort(self.pair[p], kind="stable")[1:]:
                if self.pair[p, q] > 2 * eps:
                    break
                new_lo = np.minimum(lo, self.pts[q])
                new_hi = np.maximum(hi, self.pts[q])
                if np.max(new_hi - new_lo) <= 2 * eps:
                    lo, hi = new_lo, new_hi
            centers.append((lo + hi) / 2.0)
        centers = np.asarray(centers)
        member = pairwise_distances(centers, self.pts, self.nrm) <= eps
        lost = ~member[np.arange(self.K.size), np.arange(self.K.size)]
        if lost.any():
            # rounding pushed the seed point out of its own ball
            centers[lost] = self.pts[lost]
            member[lost] = pairwise_distances(centers[lost], self.pts, self.nrm) <= eps
        return member, centers

    def cover(self, eps: float, limit: Optional[int] = None) -> np.ndarray:
        """Centers of an eps-cover; minimal in exact mode unless the limit stops the search."""
        if self.line:
            return self._sweep(eps, limit)
        if self.mode == "exact":
            if self.nrm.is_sup:
                masks, centers = self._clique_sets(eps)
            else:
                member = self.cand_dist <= eps
                masks = [_mask_of(row) for row in member]
                centers = self.candidates
            _, chosen = min_set_cover(masks, self.universe, limit)
            return centers[chosen]
        if self.nrm.is_sup:
            member, centers = self._grown_sets(eps)
        else:
            member, centers = self.cand_dist <= eps, self.candidates
        return centers[_greedy_cover(member, limit)]

    def feasible(self, eps: float, limit: int) -> bool:
        return self.cover(eps, limit).shape[0] <= limit

    def relaxed_feasible(self, eps: float, limit: int) -> bool:
        """Clique cover of the graph d(x, x') <= 2 eps: any eps-ball lies inside one clique."""
        if self.line or self.nrm.is_sup:
            return self.feasible(eps, limit)
        size, _ = min_set_cover(_maximal_cliques(self._adjacency(eps)), self.universe, limit)
        return size <= limit


def _check_eps(eps: float):
    if not eps > 0 or not math.isfinite(eps):
        raise InputError(f"Covering radius must be positive and finite, got {eps}")


def covering_number(K: PointCloudSet, eps: float, mode: Mode = "exact") -> int:
    """
    The eps-covering number N_eps(K) with centers from the candidate set.

    Exact mode solves minimum set cover by branch and bound (sup norms use the
    maximal cliques of the 2 eps proximity graph, other norms the points and
    their pairwise midpoints). Point sets on a line are swept in one pass.
    Greedy mode is the standard ln|K| + 1 approximation.
    """
    _check_eps(eps)
    return int(_CoverSolver(K, mode).cover(eps).shape[0])


def verify_cover(K: PointCloudSet, cover: Cover) -> bool:
    """Independent check that every point of K is within the cover radius of a center."""
    if cover.centers.ndim != 2 or cover.centers.shape[1] != K.dimension:
        raise InputError("Cover centers do not live in the ambient space of K")
    return bool(np.max(nearest_distances(K.points, cover.centers, K.norm)) <= cover.radius)


def find_cover(K: PointCloudSet, eps: float, mode: Mode = "exact") -> Cover:
    _check_eps(eps)
    centers = _CoverSolver(K, mode).cover(eps)
    cover = Cover(centers=centers, radius=eps, verified=False)
    if not verify_cover(K, cover):
        raise InvalidCertificateError(f"Solver returned a cover that misses points at eps={eps}")
    return Cover(centers=centers, radius=eps, verified=True)


def covering_number_exhaustive(K: PointCloudSet, eps: float) -> int:
    """
    Oracle for small sets: dynamic programming over all subsets of K.

    A subset counts as one ball when its Chebyshev center (sup norms) or one of
    the candidate centers (other norms) is within eps of all of its points.
    """
    _check_eps(eps)
    size = K.size
    if size > 16:
        raise CapacityError(f"Exhaustive covering is limited to 16 points, got {size}")
    pts, nrm = K.points, K.norm
    full = (1 << size) - 1
    coverable = np.zeros(full + 1, dtype=bool)
    if nrm.is_sup or K.dimension == 1:
        lo = np.zeros((full + 1, K.dimension))
        hi = np.zeros((full + 1, K.dimension))
        for m in range(1, full + 1):
            low = m & -m
            i = low.bit_length() - 1
            rest = m ^ low
            lo[m] = pts[i] if rest == 0 else np.minimum(lo[rest], pts[i])
            hi[m] = pts[i] if rest == 0 else np.maximum(hi[rest], pts[i])
            members = pts[list(_bits(m))]
            coverable[m] = np.max(distances_to(members, (lo[m] + hi[m]) / 2.0, nrm)) <= eps
    else:
        candidates = np.vstack([pts, midpoints(pts)]) if size > 1 else pts
        for row in pairwise_distances(candidates, pts, nrm) <= eps:
            coverable[_mask_of(row)] = True
        for b in range(size):
            for m in range(full, -1, -1):
                if not m >> b & 1 and coverable[m | 1 << b]:
                    coverable[m] = True
    best = [0] * (full + 1)
    for m in range(1, full + 1):
        low = m & -m
        rest = m ^ low
        value = size + 1
        sub = rest
        while True:
            s = sub | low
            if coverable[s]:
                value = min(value, best[m ^ s] + 1)
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[m] = value
    return best[full]


# ---------------------------------------------------------------------------
# entropy numbers
# ---------------------------------------------------------------------------

def packing_lower_bound(K: PointCloudSet, n: int, starts: Optional[int] = None) -> float:
    """
    Lower bound on eps_n(K) from 2^n + 1 points picked by farthest-point sampling.

    Points pairwise at least s apart cannot share a ball of radius below s / 2,
    so half the smallest separation bounds eps_n from below.
    """
    if n < 0:
        raise InputError(f"n must be nonnegative, got {n}")
    m = 2 ** n + 1
    if K.size < m:
        return 0.0
    starts = starts or LIPWIDTH_CONFIG["packing_starts"]
    pts, nrm = K.points, K.norm
    best = 0.0
    for s in np.unique(np.linspace(0, K.size - 1, min(starts, K.size)).astype(int)):
        nearest = distances_to(pts, pts[s], nrm)
        separation = math.inf
        for _ in range(m - 1):
            nxt = int(np.argmax(nearest))
            separation = min(separation, float(nearest[nxt]))
            nearest = np.minimum(nearest, distances_to(pts, pts[nxt], nrm))
        best = max(best, separation / 2.0)
    return best


def _bisect(feasible: Callable[[float], bool], hi: float, tol: float) -> Tuple[float, float]:
    lo = 0.0
    while hi - lo > tol:
        mid = (lo + hi) / 2.0
        if mid <= lo or mid >= hi:
            break
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def _bracket(K: PointCloudSet, n: int, tol: Optional[float], mode: Mode, cache: dict) -> EntropyBracket:
    if n < 0:
        raise InputError(f"n must be nonnegative, got {n}")
    if K.size <= 2 ** n:
        return EntropyBracket(n=n, lower=0.0, upper=0.0, method="trivial")
    if "solver" not in cache:
        cache["solver"] = _CoverSolver(K, mode)
        cache["cheb"] = chebyshev_radius(K)
    solver, cheb = cache["solver"], cache["cheb"]
    if tol is None:
        tol = LIPWIDTH_CONFIG["bisection_rel_tol"] * cheb.upper
    if not tol > 0:
        raise InputError(f"tol must be positive, got {tol}")
    limit = 2 ** n
    hi = cheb.upper
    if not solver.feasible(hi, limit):
        hi = diameter(K)
    lo, upper = _bisect(lambda e: solver.feasible(e, limit), hi, tol)
    if solver.method == "exact":
        lower = lo
    elif solver.method == "exact-candidates":
        lower, _ = _bisect(lambda e: solver.relaxed_feasible(e, limit), upper, tol)
    else:
        lower = 0.0
    lower = max(lower, packing_lower_bound(K, n))
    if n == 0:
        lower = max(lower, cheb.lower)
    logger.debug(f"eps_{n}({K.label}) in [{lower:.9g}, {upper:.9g}] ({solver.method})")
    return EntropyBracket(n=n, lower=min(lower, upper), upper=upper, method=solver.method)


def entropy_number(K: PointCloudSet, n: int, tol: Optional[float] = None, mode: Mode = "auto") -> EntropyBracket:
    """
    Bracket on eps_n(K), the smallest radius at which 2^n balls cover K.

    Args:
        K: finite point set
        n: index, 2^n balls
        tol: bisection width, defaults to the configured relative tolerance times rad(K)
        mode: exact, greedy, or auto (exact when the set fits the cap)

    Returns:
        EntropyBracket: lower and upper bound with the method used
    """
    return _bracket(K, n, tol, mode, {})


def entropy_profile(K: PointCloudSet, n_max: int, tol: Optional[float] = None, mode: Mode = "auto") -> EntropyProfile:
    """Brackets for n = 0 .. n_max, tightened with the monotonicity of eps_n."""
    if n_max < 0:
        raise InputError(f"n_max must be nonnegative, got {n_max}")
    cache: dict = {}
    raw = [_bracket(K, n, tol, mode, cache) for n in range(n_max + 1)]
    uppers = np.minimum.accumulate([b.upper for b in raw])
    lowers = np.maximum.accumulate([b.lower for b in raw][::-1])[::-1]
    brackets = [
        EntropyBracket(n=b.n, lower=float(min(lo, up)), upper=float(up), method=b.method)
        for b, lo, up in zip(raw, lowers, uppers)
    ]
    return EntropyProfile(label=K.label, brackets=brackets)


# ---------------------------------------------------------------------------
# covers through Lipschitz maps
# ---------------------------------------------------------------------------

def lipschitz_cover_size_bound(gamma: float, eps: float, n: int) -> Tuple[int, float]:
    """(2 ceil(gamma / eps) + 1)^n for the lattice cover and the cruder (6 gamma / eps)^n."""
    _check_eps(eps)
    return (2 * math.ceil(gamma / eps) + 1) ** n, (6.0 * gamma / eps) ** n


def _images(fn: Callable[[np.ndarray], np.ndarray], ys: np.ndarray, batched: bool) -> np.ndarray:
    if batched:
        return np.atleast_2d(np.asarray(fn(ys), dtype=float))
    return np.stack([np.asarray(fn(y), dtype=float).ravel() for y in ys])


def cover_from_lipschitz(
    fn: Callable[[np.ndarray], np.ndarray],
    gamma: float,
    param_dim: int,
    eps: float,
    nrm: Norm,
    samples: Optional[np.ndarray] = None,
    seed: Optional[int] = None,
    batched: bool = False,
) -> Cover:
    """
    Cover of fn(B_{l_inf^n}(1)) by the images of a lattice of the parameter ball.

    The lattice has l_inf fineness delta = eps / gamma, so a gamma-Lipschitz fn
    puts every image point within eps of a center. The claim is checked on
    seeded parameter draws and on any supplied image points.

    Args:
        fn: parameter vector -> ambient vector, or (B, n) -> (B, dim) when batched
        gamma: claimed Lipschitz constant from (l_inf^n) into the ambient norm
        param_dim: n
        eps: cover radius
        nrm: ambient norm
        samples: extra ambient points of the image set to verify against

    Returns:
        Cover: verified cover with at most (2 ceil(gamma / eps) + 1)^n centers
    """
    _check_eps(eps)
    if gamma < 0 or param_dim < 1:
        raise InputError(f"Need gamma >= 0 and param_dim >= 1, got {gamma}, {param_dim}")
    if gamma == 0:
        lattice = np.zeros((1, param_dim))
        delta = 1.0
    else:
        delta = eps / gamma
        while gamma * delta > eps:
            delta = np.nextafter(delta, 0.0)
        lattice = linf_ball_lattice(param_dim, delta)
    centers = _images(fn, lattice, batched)
    if centers.shape[1] != nrm.dimension:
        raise InputError(f"Map images have dimension {centers.shape[1]}, norm expects {nrm.dimension}")

    rng = np.random.default_rng(LIPWIDTH_CONFIG["seed"] if seed is None else seed)
    ys = rng.uniform(-1.0, 1.0, size=(LIPWIDTH_CONFIG["cover_verification_samples"], param_dim))
    points = _images(fn, ys, batched)
    if gamma > 0:
        per_axis = math.ceil(1.0 / delta - 1e-12) + 1
        index = np.clip(np.rint((ys + 1.0) / (2.0 * delta)), 0, per_axis - 1).astype(int)
        flat = np.ravel_multi_index(index.T, (per_axis,) * param_dim)
        gaps = nrm.measure(points - centers[flat])
    else:
        gaps = nrm.measure(points - centers[0])
    missed = gaps > eps
    if missed.any():
        gaps[missed] = nearest_distances(points[missed], centers, nrm)
    if samples is not None:
        extra = np.atleast_2d(np.asarray(samples, dtype=float))
        points = np.vstack([points, extra])
        gaps = np.concatenate([gaps, nearest_distances(extra, centers, nrm)])
    if np.max(gaps) > eps:
        raise InvalidCertificateError(
            f"An image point is {np.max(gaps):.6g} from every center at eps={eps}: "
            f"the map is not {gamma}-Lipschitz"
        )

    cover = Cover(centers=centers, radius=eps, verified=False)
    sampled = PointCloudSet(points=points, norm=nrm)
    if not verify_cover(sampled, cover):
        raise InvalidCertificateError("Lattice cover failed the independent re-check")
    bound, _ = lipschitz_cover_size_bound(gamma, eps, param_dim)
    if cover.size > bound:
        raise InvalidCertificateError(f"Lattice cover has {cover.size} centers, above the bound {bound}")
    logger.info(f"Lattice cover with {cover.size} centers at eps={eps} (bound {bound})")
    return Cover(centers=centers, radius=eps, verified=True)
