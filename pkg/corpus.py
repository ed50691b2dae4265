"""The shipped corpus: dyadic interval, sigma sets and a Takagi coefficient family."""
import logging
import os
from typing import Dict, List, Optional, Sequence

import numpy as np

from carl import check_carl_consistency
from entropy import entropy_profile
from schema import CarlReport, CorpusEntry, EntropyProfile, WidthEstimate
from spaces import save_point_cloud, sigma_set, uniform_interval
from takagi import coefficient_family, takagi_cloud
from widths import anchor_family, linear_family, width_upper_profile

logger = logging.getLogger(__name__)

# sizes of the corpus clouds
CORPUS_CONFIG = {
    "dyadic_points": 4097,
    "dyadic_n_max": 6,
    "sigma_truncations": [20, 40],
    "sigma_n_max": 5,
    "sigma_anchors": 3,
    "takagi_terms": 3,
    "takagi_size": 160,
    "takagi_grid_points": 257,
    "takagi_n_max": 4,
    "width_delta": 0.125,
}


def dyadic_entry(points: Optional[int] = None, n_max: Optional[int] = None) -> CorpusEntry:
    """[0, 1] on a uniform grid, bounded by t -> (1 + t) / 2 on B(1)."""
    K = uniform_interval(points or CORPUS_CONFIG["dyadic_points"], label="dyadic_interval")
    segment = linear_family([0.5], [[0.5]], K.norm, id="segment")
    return CorpusEntry(
        cloud=K,
        witnesses=[segment],
        n_max=CORPUS_CONFIG["dyadic_n_max"] if n_max is None else n_max,
        delta=CORPUS_CONFIG["width_delta"],
    )


def sigma_entry(J: int, anchors: Optional[int] = None) -> CorpusEntry:
    """
    K(sigma) truncated at J with the spans of its first m points as witnesses.

    The m-th witness reaches 0 and sigma_1 e_1 .. sigma_m e_m, so its raw
    distance to the cloud is sigma_{m+1}.
    """
    K = sigma_set(J)
    anchors = min(J, anchors or CORPUS_CONFIG["sigma_anchors"])
    base = np.zeros(J)
    witnesses = [
        anchor_family(K.points[:m], base, K.norm, id=f"sigma_span_{m}")
        for m in range(1, anchors + 1)
    ]
    return CorpusEntry(cloud=K, witnesses=witnesses, n_max=CORPUS_CONFIG["sigma_n_max"], delta=CORPUS_CONFIG["width_delta"])


def takagi_entry(
    n_terms: Optional[int] = None,
    size: Optional[int] = None,
    grid_points: Optional[int] = None,
    seed: Optional[int] = None,
) -> CorpusEntry:
    """Seeded sample of sum_k c_k H^k with coefficient families of 1 .. n_terms as witnesses."""
    n_terms = n_terms or CORPUS_CONFIG["takagi_terms"]
    grid_points = grid_points or CORPUS_CONFIG["takagi_grid_points"]
    K = takagi_cloud(n_terms, size or CORPUS_CONFIG["takagi_size"], grid_points, seed)
    witnesses = [coefficient_family(m, grid_points) for m in range(1, n_terms + 1)]
    return CorpusEntry(cloud=K, witnesses=witnesses, n_max=CORPUS_CONFIG["takagi_n_max"], delta=CORPUS_CONFIG["width_delta"])


def build_corpus(quick: bool = False, seed: Optional[int] = None) -> List[CorpusEntry]:
    truncations = CORPUS_CONFIG["sigma_truncations"][:1] if quick else CORPUS_CONFIG["sigma_truncations"]
    entries = [dyadic_entry(1025 if quick else None)]
    entries += [sigma_entry(J) for J in truncations]
    entries.append(takagi_entry(size=64 if quick else None, seed=seed))
    return entries


def corpus_widths(entry: CorpusEntry) -> List[WidthEstimate]:
    out: List[WidthEstimate] = []
    for par in entry.witnesses:
        gammas = [f * par.gamma for f in entry.gamma_factors if f * par.gamma > 0]
        out.extend(width_upper_profile(entry.cloud, par, gammas, entry.delta))
    return out


def corpus_profile(entry: CorpusEntry) -> EntropyProfile:
    return entropy_profile(entry.cloud, entry.n_max)


def check_corpus(entries: Sequence[CorpusEntry]) -> Dict[str, CarlReport]:
    """Carl-consistency report per corpus entry."""
    reports = {}
    for entry in entries:
        profile = corpus_profile(entry)
        widths = [(e.n, e.gamma, e.upper) for e in corpus_widths(entry)]
        reports[entry.label] = check_carl_consistency(profile, widths)
        logger.info(f"{entry.label}: {reports[entry.label].checked} checks, "
                    f"{len(reports[entry.label].violations)} violations")
    return reports


def write_corpus(out_dir: str, quick: bool = False, seed: Optional[int] = None) -> List[str]:
    """Save every corpus cloud as JSON under out_dir; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for entry in build_corpus(quick, seed):
        path = os.path.join(out_dir, f"{entry.label}.json")
        save_point_cloud(entry.cloud, path)
        paths.append(path)
    return paths

