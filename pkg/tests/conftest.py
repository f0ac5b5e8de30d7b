import numpy as np
import pytest

from semiself import measures as ms
from semiself import triplets as tp


@pytest.fixture
def gauss1():
    return tp.gaussian(1.0, drift=0.2)


@pytest.fixture
def cp1():
    return tp.compound_poisson([[1.0], [-0.5]], [1.0, 0.3], drift=0.1)


@pytest.fixture
def lat1():
    lat = ms.ScaleLattice([1.0], 2.0,
                          (ms.Segment(w=0.7, r=0.4, kmin=0),
                           ms.Segment(w=0.5, r=2.0, kmin=-30, kmax=-1)))
    return tp.LevyTriplet(np.array([[0.5]]), ms.LevyMeasure((lat,)),
                          np.array([0.3]))
