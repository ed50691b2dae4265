import pandas as pd
import streamlit as st

from carl import check_carl_consistency, entropy_upper_from_nn_error, nn_lower_rate_deep, nn_lower_rate_shallow
from config import LIPWIDTH_CONFIG
from corpus import corpus_widths, dyadic_entry, sigma_entry, takagi_entry
from entropy import entropy_profile
from errors import LipwidthError
from lipbounds import certificate_for, growth_class
from schema import Activation, BoundFamily, RateFunction
from takagi import error_curve
from utils import get_certificate_dataframe, get_profile_dataframe, get_width_dataframe


def initialize_session_state():
    if 'seed' not in st.session_state:
        st.session_state.seed = LIPWIDTH_CONFIG["seed"]
    if 'lam' not in st.session_state:
        st.session_state.lam = 4.0
    if 'n_terms' not in st.session_state:
        st.session_state.n_terms = 12
    if 'profiles' not in st.session_state:
        st.session_state.profiles = {}


def display_takagi():
    st.header("Takagi partial sums")
    st.write("Sup-grid error of psi_n against f_lambda, with the geometric tail bound.")
    try:
        df = error_curve(st.session_state.lam, st.session_state.n_terms)
    except LipwidthError as e:
        st.error(str(e))
        return
    st.dataframe(df, use_container_width=True, hide_index=True)


def display_lipschitz():
    st.header("Lipschitz certificates")
    col1, col2, col3, col4 = st.columns(4)
    kind = col1.selectbox("Activation", ["relu", "sigmoidal"])
    W = col2.number_input("Width W", min_value=2, max_value=16, value=2)
    w = col3.number_input("Parameter bound w", min_value=1.0, max_value=8.0, value=1.0)
    n = col4.number_input("Depth n", min_value=1, max_value=12, value=3)
    cert = certificate_for(Activation(kind=kind), 1, int(W), float(w), int(n))
    st.write(f"Recursion bound {cert.value:.6g}, closed form {cert.closed_form:.6g}")
    st.dataframe(get_certificate_dataframe(cert), use_container_width=True, hide_index=True)


def display_entropy():
    st.header("Entropy numbers and widths")
    builders = {
        "dyadic interval": lambda: dyadic_entry(1025, 5),
        "sigma set J=20": lambda: sigma_entry(20),
        "Takagi family": lambda: takagi_entry(size=64, seed=st.session_state.seed),
    }
    name = st.selectbox("Set", list(builders))
    if st.button("Compute"):
        with st.spinner("Covering..."):
            entry = builders[name]()
            profile = entropy_profile(entry.cloud, entry.n_max)
            estimates = corpus_widths(entry)
            report = check_carl_consistency(profile, [(e.n, e.gamma, e.upper) for e in estimates])
            st.session_state.profiles[name] = (profile, estimates, report)
    if name in st.session_state.profiles:
        profile, estimates, report = st.session_state.profiles[name]
        st.subheader("Entropy brackets")
        st.dataframe(get_profile_dataframe(profile), use_container_width=True, hide_index=True)
        st.subheader("Width upper bounds")
        st.dataframe(get_width_dataframe(estimates), use_container_width=True, hide_index=True)
        if report.ok:
            st.success(f"Carl inequality holds on {report.checked} checks")
        else:
            st.error(f"{len(report.violations)} Carl-inequality violations")


def display_rates():
    st.header("Rate implications")
    rows = []
    error = RateFunction(kind="polylog", alpha=1.0, beta=0.0)
    families = {
        "w = C": BoundFamily(kind="constant", C=1.0),
        "w = n": BoundFamily(kind="polynomial", C=1.0, delta=1.0),
        "w = 2^n": BoundFamily(kind="exponential", C=1.0, c=1.0, nu=1.0),
    }
    for label, wfam in families.items():
        for regime in ("deep", "shallow"):
            lower = nn_lower_rate_deep(error, wfam) if regime == "deep" else nn_lower_rate_shallow(error, wfam)
            rows.append({
                'w': label,
                'regime': regime,
                'phi': growth_class(wfam, regime).describe(),
                'error lower rate': lower.describe(),
                'entropy from error n^-1': entropy_upper_from_nn_error(error, wfam, regime).describe(),
            })
    st.write("Error lower rates implied by eps_n ~ n^-1, and entropy upper rates implied by an error n^-1.")
    st.dataframe(pd.DataFrame(rows), use_container_width=True, hide_index=True)


def main():
    st.set_page_config(layout="wide", page_title="Lipschitz Widths Explorer")
    initialize_session_state()

    with st.sidebar:
        st.header("Settings")
        st.number_input("Seed", min_value=0, key="seed")
        st.number_input("lambda", min_value=1.5, max_value=16.0, step=0.5, key="lam")
        st.number_input("Terms n", min_value=1, max_value=30, key="n_terms")

    tab1, tab2, tab3, tab4 = st.tabs(["Takagi", "Lipschitz bounds", "Entropy", "Rates"])
    with tab1:
        display_takagi()
    with tab2:
        display_lipschitz()
    with tab3:
        display_entropy()
    with tab4:
        display_rates()


if __name__ == "__main__":
    main()
