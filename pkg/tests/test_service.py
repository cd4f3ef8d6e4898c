import math

import numpy as np
import pytest
from fastapi.testclient import TestClient

from bggl import __version__
from bggl.estimate import fit_bggl
from bggl.params import BgglParams, PairedSample
from bggl.sample import RngStream, draw_pairs
from bggl.service.app import app

THETA = {"alpha": 1.5, "beta": 2.0, "delta": 0.1, "mu": 0.5, "sigma": 0.8}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": __version__}


def test_sample_matches_library(client):
    r = client.post("/sample", json={"theta": THETA, "n": 50, "seed": 7})
    assert r.status_code == 200
    x, y = draw_pairs(BgglParams(**THETA), 50, RngStream(7))
    assert r.json()["x"] == x.tolist() and r.json()["y"] == y.tolist()


def test_sample_default_seed(client):
    a = client.post("/sample", json={"theta": THETA, "n": 5}).json()
    b = client.post("/sample", json={"theta": THETA, "n": 5, "seed": 20240917}).json()
    assert a == b


def test_fit_matches_library(client):
    x, y = draw_pairs(BgglParams(**THETA), 300, RngStream(8))
    r = client.post("/fit", json={"x": x.tolist(), "y": y.tolist()})
    assert r.status_code == 200
    body = r.json()
    ref = fit_bggl(PairedSample(x, y))
    assert body["theta_hat"]["alpha"] == ref.alpha_hat
    assert body["theta_hat"]["mu"] == ref.mu_hat
    assert body["regime"] == "regular" and body["n"] == 300


@pytest.mark.parametrize(
    "path, payload",
    [
        ("/sample", {"theta": {**THETA, "alpha": -1}, "n": 5}),
        ("/sample", {"theta": THETA, "n": 0}),
        ("/fit", {"x": [1.0, 2.0], "y": [1.0]}),
        ("/qq", {"values": [1.0, 2.0], "law": "gamma"}),
        ("/rate-slope", {"theta": THETA, "n_grid": [10, 20]}),
    ],
)
def test_validation_errors(client, path, payload):
    assert client.post(path, json=payload).status_code == 422


def test_model_error_maps_to_400(client):
    r = client.post("/fit", json={"x": [1.0, -1.0, 2.0], "y": [0.0, 0.0, 0.0]})
    assert r.status_code == 400
    assert r.json()["error"] == "DomainError"


def test_finance_bad_csv(client):
    r = client.post("/finance", json={"csv_text": "date,close\n2020-01-03,1\n"})
    assert r.status_code == 400 and r.json()["error"] == "DataFormatError"


def test_finance(client):
    from bggl.finance import synthetic_series

    series = synthetic_series(0.3, 0.7, BgglParams(1.2, 8, 0.02, -0.001, 0.005), 120, RngStream(9))
    text = "date,close,vol\n" + "".join(
        f"{d},{float(c)!r},{float(v)!r}\n" for d, c, v in zip(series.dates, series.close, series.vol)
    )
    body = client.post("/finance", json={"csv_text": text}).json()
    assert body["n"] == 119
    assert set(body["qq"]) == {"x_gamma", "y_gal", "z_normal"}
    assert len(body["qq"]["y_gal"]["theoretical"]) == 119


def test_qq_normal(client):
    body = client.post("/qq", json={"values": [2.0, -2.0], "law": "normal"}).json()
    assert body["empirical"] == [-2.0, 2.0]
    assert body["theoretical"][1] == pytest.approx(0.6744897501960817, rel=1e-12)


def test_levy_path(client):
    body = client.post("/levy-path", json={"theta": THETA, "t_max": 2.0, "steps": 10}).json()
    assert len(body["times"]) == len(body["g"]) == len(body["w"]) == 11
    assert body["times"][-1] == 2.0
    assert np.all(np.diff(body["g"]) >= 0)


def test_limit_law(client):
    body = client.post("/limit-law", json={"theta": {**THETA, "alpha": 0.5}, "size": 20}).json()
    assert body["regime"] == "heavy"
    assert np.array(body["draws"]).shape == (20, 5)
    forced = client.post("/limit-law", json={"theta": THETA, "size": 3, "regime": "boundary"}).json()
    assert forced["regime"] == "boundary"


def test_rate_slope(client):
    body = client.post(
        "/rate-slope", json={"theta": {**THETA, "alpha": 2.0}, "n_grid": [50, 100, 200], "replications": 50}
    ).json()
    assert body["theoretical_slope"] == -0.5
    assert math.isfinite(body["slope"]) and len(body["rmse"]) == 3


def test_table1_small(client):
    body = client.post("/table1", json={"seed": 1, "replications": 3}).json()
    assert len(body["reports"]) == 8
    assert body["text"].count("Sample size") == 8
