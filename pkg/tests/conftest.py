import numpy as np
import pytest
from hypothesis import strategies as st

from conewright.hypgeo import HPoint, Isometry


def random_isometry(rng: np.random.Generator, spread: float = 1.0) -> Isometry:
    m = spread * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return Isometry.from_matrix(m / np.sqrt(np.linalg.det(m)))


def random_hpoint(rng: np.random.Generator) -> HPoint:
    return HPoint(float(rng.normal()), float(rng.normal()), float(np.exp(rng.normal())))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


coord = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
complexes = st.builds(complex, coord, coord)


@st.composite
def isometries(draw):
    a, b, c, d = (draw(complexes) for _ in range(4))
    det = a * d - b * c
    if abs(det) < 0.05:
        a += 1.0
        d += 1.0
        det = a * d - b * c
    if abs(det) < 0.05:
        return Isometry.identity()
    return Isometry.from_matrix([[a, b], [c, d]])
