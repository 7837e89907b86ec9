from __future__ import annotations

import numpy as np
import pytest

from divaudit import make_multinomial, random_simplex


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def random_pairs(rng):
    """Interior (P, Q) pairs of mixed sizes"""
    pairs = []
    for n in (2, 3, 5, 8):
        a = random_simplex(rng, n, 25)
        b = random_simplex(rng, n, 25)
        pairs.extend((make_multinomial(p), make_multinomial(q)) for p, q in zip(a, b))
    return pairs


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    out = tmp_path / "out"
    monkeypatch.setenv("DIVAUDIT_OUTPUT_DIR", str(out))
    return out
