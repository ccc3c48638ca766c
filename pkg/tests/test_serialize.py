import json
import math

import numpy as np
import pytest

from clwekit.distributions import ClweBatch, ClweParams, LweParams, gen_clwe, gen_lwe
from clwekit.samplers import RngStream, sample_sparse_secret, sample_unit_secret
from clwekit.serialize import dumps_record, read_samples, write_samples


def test_float_roundtrip_bit_faithful(tmp_path):
    rng = RngStream(60)
    w = sample_unit_secret(5, rng)
    batch = gen_clwe(ClweParams(5, 200, 2.0, 0.05), w, rng=rng)
    path = tmp_path / "clwe.jsonl"
    write_samples(path, batch, {"gamma": 2.0, "beta": 0.05}, seed=60)
    header, back = read_samples(path)
    assert header["kind"] == "clwe" and header["seed"] == 60
    assert np.array_equal(back.a, batch.a)
    assert np.array_equal(back.b, batch.b)


def test_lwe_roundtrip_preserves_integers(tmp_path):
    rng = RngStream(61)
    s = sample_sparse_secret(6, 2, rng)
    batch = gen_lwe(LweParams(6, 100, 257, 3.0), s, rng=rng)
    path = tmp_path / "lwe.jsonl"
    write_samples(path, batch, {"q": 257, "sigma": 3.0}, seed=61)
    _, back = read_samples(path)
    assert back.a.dtype == np.int64 and back.b.dtype == np.int64
    assert np.array_equal(back.a, batch.a) and np.array_equal(back.b, batch.b)
    assert back.a_domain == "zq" and back.b_domain == "zq"


def test_vector_stream_roundtrip(tmp_path):
    arr = np.array([[0.1, -2.5], [math.pi, 1e-17]])
    path = tmp_path / "vec.jsonl"
    write_samples(path, arr, {}, seed=0)
    header, back = read_samples(path)
    assert header["kind"] == "vector"
    assert np.array_equal(back, arr)


def test_header_is_valid_json_with_17_digits(tmp_path):
    batch = ClweBatch(np.array([[1.0 / 3.0]]), np.array([0.1]))
    path = tmp_path / "one.jsonl"
    write_samples(path, batch, {"x": 1.0 / 3.0}, seed=1)
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["record"] == "header" and header["format_version"] == 1
    assert "0.33333333333333331" in lines[1]
    assert json.loads(lines[1])["a"][0] == 1.0 / 3.0


def test_dumps_record_types():
    s = dumps_record({"a": [1, 2.5], "flag": True, "none": None, "s": "x"})
    assert json.loads(s) == {"a": [1, 2.5], "flag": True, "none": None, "s": "x"}
    with pytest.raises(TypeError):
        dumps_record({"bad": object()})


def test_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"a": [1.0], "b": 0.5}\n')
    with pytest.raises(ValueError):
        read_samples(path)
