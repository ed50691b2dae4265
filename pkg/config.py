import os

# Numerical configuration shared by all modules
LIPWIDTH_CONFIG = {
    # c0 in ||f||_X <= c0 ||f||_C(Omega); every Lipschitz bound scales linearly in it
    "embedding_constant": 1.0,
    # c in gamma_n = 2^{c n (1 + log2 w(n))}
    "gamma_constant": 1.0,
    "exact_cover_cap": 22,
    "bisection_rel_tol": 1e-6,
    "grid_points_per_axis": 1025,
    "lipschitz_grid_points": 33,
    "seed": 20240917,
    "spot_check_pairs": 64,
    # sampled pairs behind the CLI's empirical Lipschitz constant
    "empirical_pairs": 32,
    "cover_verification_samples": 1000,
    "packing_starts": 16,
    "midpoint_candidate_cap": 200,
    "activation_check_points": 20001,
    "lattice_cap": 2_000_000,
}

# Sizes used by the acceptance suite; "quick" trims the slow criteria
SUITE_CONFIG = {
    "full": {
        "takagi_n_max": 25,
        "network_n_max": 20,
        "lipschitz_configs": 50,
        "lipschitz_trials": 64,
        "dyadic_points": 4097,
        "dyadic_n_max": 6,
        "sigma_truncations": [20, 40],
        "oracle_clouds": 200,
    },
    "quick": {
        "takagi_n_max": 25,
        "network_n_max": 12,
        "lipschitz_configs": 12,
        "lipschitz_trials": 24,
        "dyadic_points": 1025,
        "dyadic_n_max": 5,
        "sigma_truncations": [20],
        "oracle_clouds": 40,
    },
}


def thread_cap() -> int:
    """Worker count for internal parallel sweeps, read from LIPWIDTH_THREADS."""
    raw = os.getenv("LIPWIDTH_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)
