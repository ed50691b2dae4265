import os

from streamlit.testing.v1 import AppTest

APP = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "app.py")


def test_app_renders_tabs():
    at = AppTest.from_file(APP).run(timeout=60)
    assert not at.exception
    assert len(at.tabs) == 4
    assert len(at.dataframe) >= 3


def test_app_recomputes_on_lambda_change():
    at = AppTest.from_file(APP).run(timeout=60)
    at.number_input(key="lam").set_value(2.0).run(timeout=60)
    assert not at.exception
    assert at.session_state.lam == 2.0


def test_app_entropy_tab():
    at = AppTest.from_file(APP).run(timeout=60)
    at.button[0].click().run(timeout=120)
    assert not at.exception
    assert len(at.success) == 1
    assert "dyadic interval" in at.session_state.profiles
