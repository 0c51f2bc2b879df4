import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from casualstab.serialize import SCHEMA_VERSION, dumps, with_schema
from casualstab.verify import Verdict


def test_fixed_digits_and_nulls():
    text = dumps({"a": 0.1, "b": float("nan"), "c": np.float64(1e-300), "d": math.inf, "e": 3})
    assert '"a": 0.10000000000000001' in text
    assert '"b": null' in text and '"d": null' in text
    assert json.loads(text)["c"] == 1e-300


def test_key_order_enum_and_arrays():
    text = dumps({"z": Verdict.PASS, "a": np.arange(3), "m": [{"x": 1j}]})
    obj = json.loads(text)
    assert list(obj) == ["z", "a", "m"]
    assert obj["z"] == "PASS" and obj["a"] == [0, 1, 2] and obj["m"][0]["x"] == [0.0, 1.0]


def test_schema_header():
    assert list(with_schema({"k": 1})) == ["schema_version", "k"]
    assert with_schema({})["schema_version"] == SCHEMA_VERSION


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_floats_round_trip(x):
    assert json.loads(dumps([x]))[0] == x


@given(st.recursive(st.one_of(st.floats(allow_nan=False, allow_infinity=False), st.integers(-10**6, 10**6),
                              st.text(max_size=5), st.booleans(), st.none()),
                    lambda c: st.lists(c, max_size=3) | st.dictionaries(st.text(max_size=4), c, max_size=3),
                    max_leaves=10))
def test_output_is_valid_and_stable(obj):
    text = dumps(obj)
    assert json.loads(text) == obj
    assert dumps(obj) == text
