"""Smoke tests for the python bindings: one pass over the main operations."""

import math

import pytest

diforge = pytest.importorskip("diforge")


@pytest.fixture(scope="module")
def book():
    p = diforge.CodebookParams()
    p.n = 24
    p.L = 2
    p.delta = 0.2
    p.radii = [0.8, 0.45]
    p.min_proj_dist = 0.3
    p.branching = [3, 3]
    p.seed = 17
    p.mode = diforge.BuildMode.Custom
    return diforge.build_primitive(p)


def test_build_and_verify(book):
    assert len(book.leaf_ids) == 9
    check = diforge.verify_codebook(book)
    assert check.ok
    assert check.max_path_inner <= 1e-10
    assert check.max_word_radius_rel_err <= 1e-9


def test_save_load_roundtrip(book, tmp_path):
    path = str(tmp_path / "book.json")
    diforge.save_codebook(book, path)
    back = diforge.load_codebook(path)
    assert back.params.n == book.params.n
    assert back.params.radii == book.params.radii
    for wid in book.leaf_ids:
        a = diforge.codeword_vector(book, wid)
        b = diforge.codeword_vector(back, wid)
        assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-12


def test_transmit_and_identify(book):
    ch = diforge.bernoulli_channel(24)
    ids, rep = diforge.expurgate(book, ch.input_box(), 0, False)
    assert rep.retained == len(ids) >= 2

    w = diforge.codeword_vector(book, ids[0])
    y = diforge.transmit(ch, w, seed=5)
    assert all(v in (0.0, 1.0) for v in y)

    dec = diforge.custom_decoder(0.1)
    assert diforge.identify(w, book, ids[0], dec).accepted


def test_error_estimate(book):
    ch = diforge.bernoulli_channel(24)
    ids, _ = diforge.expurgate(book, ch.input_box(), 0, False)
    dec = diforge.custom_decoder(12.0)
    est = diforge.estimate_missed_id(book, ch, dec, ids, trials=200, seed=3)
    assert est.failures == 0
    assert est.consistent
    rerun = diforge.estimate_missed_id(book, ch, dec, ids, trials=200, seed=3)
    assert rerun.p_hat == est.p_hat


def test_catalog_values():
    cat = diforge.capacity_catalog(1000, 2, 0.2)
    assert cat.eta_L == 0.25
    assert cat.linearithmic_rate_bound == pytest.approx(0.3, abs=1e-12)
    assert cat.lambda1 == 2 * cat.lambda_
    assert cat.t == pytest.approx(math.log(1000), abs=1e-12)


def test_exceptions():
    p = diforge.CodebookParams()
    p.n = 16
    p.L = 1
    p.delta = 1.5  # outside (0, 1)
    p.radii = [1.0]
    p.min_proj_dist = 0.5
    p.branching = [2]
    with pytest.raises(ValueError):
        diforge.build_primitive(p)

    with pytest.raises(diforge.RegimeViolation):
        diforge.rr_build(64, 2, 0.5, 0.9, [2, 2], 1)

    p.delta = 0.2
    p.min_proj_dist = 1.99  # nearly antipodal, 8 points cannot fit
    p.branching = [8]
    p.max_attempts = 20000
    with pytest.raises(diforge.PlacementExhausted):
        diforge.build_primitive(p)
