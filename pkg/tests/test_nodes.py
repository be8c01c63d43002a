"""Node dynamics: drift, sector condition, storage."""

import numpy as np
import pytest

from signet.edgefn import GridSpec
from signet.errors import UnsupportedDynamics, ValidationError
from signet.nodes import Identity, Saturating, SignPower, drift, sector_check, storage

GRID = GridSpec(10.0, 1001)


def test_drift_examples():
    assert drift(Identity(), 2.5) == 2.5
    assert drift(SignPower(1.0, 0.5), 4.0) == 2.0
    for d in (Identity(), SignPower(2.0, 0.7), Saturating(1.0, 1.0)):
        assert drift(d, 0.0) == 0.0


def test_sector_check():
    assert sector_check(Identity(), GRID)
    assert sector_check(Saturating(1.0, 1.0), GRID)
    assert sector_check(SignPower(3.0, 0.3), GRID)
    assert not sector_check(lambda u: -u, GRID)
    assert not sector_check(lambda u: 0.0, GRID)


def test_gamma_is_odd():
    rng = np.random.default_rng(2)
    for d in (Identity(), SignPower(2.0, 0.4), Saturating(3.0, 0.5)):
        for u in rng.uniform(0.01, 20.0, size=50):
            assert d.gamma(-u) == pytest.approx(-d.gamma(u), rel=1e-12)


def test_batch_gamma_matches_scalar():
    u = np.linspace(-5, 5, 41)
    for d in (Identity(), SignPower(2.0, 0.4), Saturating(3.0, 0.5)):
        np.testing.assert_allclose(d.batch_gamma(u), [d.gamma(v) for v in u])


def test_storage_examples():
    d = Identity()
    assert storage(d, 3.0, 1.0) == 2.0
    assert storage(d, 1.0, 1.0) == 0.0
    assert storage(d, 0.0, 2.0) == 2.0


def test_storage_rejects_non_identity():
    with pytest.raises(UnsupportedDynamics):
        storage(SignPower(1.0, 0.5), 1.0, 0.0)


def test_parameter_validation():
    with pytest.raises(ValidationError):
        SignPower(-1.0, 0.5)
    with pytest.raises(ValidationError):
        SignPower(1.0, 1.5)
    with pytest.raises(ValidationError):
        Saturating(1.0, 0.0)
