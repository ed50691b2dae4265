import json
import math

import numpy as np
import pandas as pd

from network import flatten, random_params, unflatten
from schema import Activation, EntropyBracket, EntropyProfile, FeedForwardNet, Norm, RateFunction
from utils import (
    csv_text,
    dumps_json,
    format_number,
    get_profile_dataframe,
    parallel_map,
    profile_from_dataframe,
    read_table,
    widths_from_dataframe,
)


def test_floats_keep_seventeen_digits():
    assert dumps_json({"x": 0.1}) == '{"x": 0.10000000000000001}'
    assert dumps_json([1, True, None]) == "[1, true, null]"
    assert dumps_json({"a": np.array([0.5, math.inf])}) == '{"a": [0.5, "inf"]}'
    assert format_number(-math.inf) == "-inf"


def test_models_render_through_aliases():
    text = dumps_json(Norm.lp(math.inf, 2))
    assert '"p": "inf"' in text
    assert '"dimension": 2' in text


def test_csv_round_trip(tmp_path):
    profile = EntropyProfile(label="demo", brackets=[
        EntropyBracket(n=0, lower=0.5, upper=0.5, method="exact"),
        EntropyBracket(n=1, lower=0.2, upper=0.25, method="greedy"),
    ])
    path = tmp_path / "profile.csv"
    path.write_text(csv_text(get_profile_dataframe(profile), "demo profile"))
    back = profile_from_dataframe(read_table(str(path)), label="demo")
    assert back == profile


def test_widths_from_dataframe():
    df = pd.DataFrame([{"n": 2, "gamma": 1.0, "upper": 0.1, "delta": 0.1}])
    assert widths_from_dataframe(df) == [(2, 1.0, 0.1)]
    assert widths_from_dataframe(pd.DataFrame()) == []


def test_parallel_map_keeps_order(monkeypatch):
    monkeypatch.setenv("LIPWIDTH_THREADS", "4")
    assert parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]


def _random_models(rng):
    layout = (int(rng.integers(1, 3)), int(rng.integers(1, 4)), int(rng.integers(1, 4)))
    act = Activation(kind=str(rng.choice(["relu", "identity"])))
    w = float(rng.uniform(0.1, 10.0))
    net = unflatten(random_params(layout, w, rng), act, layout=layout, bound=w)
    uppers = np.sort(rng.uniform(0.0, 1.0, size=int(rng.integers(1, 6))))[::-1]
    profile = EntropyProfile(label=f"cloud_{rng.integers(1000)}", brackets=[
        EntropyBracket(n=k, lower=float(u * rng.uniform()), upper=float(u), method="greedy")
        for k, u in enumerate(uppers)
    ])
    norm = Norm.lp(float(rng.choice([1.0, 2.0, rng.uniform(1.0, 5.0), math.inf])), int(rng.integers(1, 6)))
    rate = RateFunction(kind="polylog", alpha=float(rng.uniform(0.1, 3.0)), beta=float(rng.uniform(-2.0, 2.0)))
    return net, profile, norm, rate


def test_models_survive_repeated_json_round_trips():
    rng = np.random.default_rng(99)
    for _ in range(100):
        net, profile, norm, rate = _random_models(rng)
        back = FeedForwardNet(**json.loads(dumps_json(net)))
        assert np.array_equal(flatten(back).values, flatten(net).values)
        assert back.channel_activations == net.channel_activations
        assert back.param_bound == net.param_bound
        assert EntropyProfile(**json.loads(dumps_json(profile))) == profile
        assert Norm(**json.loads(dumps_json(norm))) == norm
        assert RateFunction(**json.loads(dumps_json(rate))) == rate
