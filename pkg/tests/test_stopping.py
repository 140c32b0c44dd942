from fractions import Fraction

import numpy as np
import pytest

from dynkin import (
    NonNegativityViolation,
    defect,
    forward_optimal_stopping,
    recurrent_classes,
    validate_generator,
)
from dynkin.recipes import birth_death_generator
from instances import instances

V0_EQUAL = [10, 6.8106, 4.9834, 4.1528]


@pytest.fixture
def bd4():
    return validate_generator(birth_death_generator(4, 1.0, 1.0))


def test_constant_payoff_stops_everywhere(bd4):
    r = forward_optimal_stopping(bd4, 0.2, np.full(4, 2.5))
    assert np.array_equal(r.value, np.full(4, 2.5))
    assert r.stop_set == frozenset(range(4))
    assert r.iterations == 1


def test_four_state_equal_case(bd4):
    r = forward_optimal_stopping(bd4, 0.2, [10, 4, 2, 1])
    assert np.allclose(r.value, V0_EQUAL, atol=5e-5)
    assert r.stop_set == frozenset({0})


def test_four_state_neq_case_exact(bd4):
    Qe = validate_generator(birth_death_generator(4, 1.0, 1.0), exact=True)
    r = forward_optimal_stopping(Qe, Fraction(1, 5), [4, 7, 0, 5])
    assert list(r.value) == [Fraction(35, 6), 7, Fraction(60, 11), 5]
    assert r.stop_set == frozenset({1, 3})
    rf = forward_optimal_stopping(bd4, 0.2, [4, 7, 0, 5])
    assert np.allclose(rf.value, [35 / 6, 7, 60 / 11, 5], atol=1e-12)


def test_forbidden_set(bd4):
    phi = [5, 10, 60 / 11, 5]
    r = forward_optimal_stopping(bd4, 0.2, [4, 7, 0, 5], forbidden={0, 3}, phi=phi)
    assert np.allclose(r.value, [5, 7, 60 / 11, 5], atol=1e-12)
    assert r.stop_set == frozenset({1})
    with pytest.raises(ValueError):
        forward_optimal_stopping(bd4, 0.2, [4, 7, 0, 5], forbidden={0})


def test_negative_payoff_rejected(bd4):
    with pytest.raises(NonNegativityViolation):
        forward_optimal_stopping(bd4, 0.2, [1, -1, 0, 0])


@pytest.mark.parametrize("idx", range(0, 200, 3))
def test_one_player_invariants(idx):
    spec = instances()[idx]
    r = forward_optimal_stopping(spec.Q, spec.beta, spec.psi)
    tol = spec.tol
    assert np.all(r.value >= spec.psi - tol)
    assert np.all(defect(spec.Q, spec.beta, r.value) <= 1e-7 * (1 + np.max(spec.psi)))
    for a, b in zip(r.trace, r.trace[1:]):
        assert b.stop_set <= a.stop_set
        assert np.all(b.value >= a.value - tol)
    dec = recurrent_classes(spec.Q)
    for cls in dec.recurrent_classes:
        assert cls & r.stop_set
        # the best state of each recurrent class is never dropped
        best = max(cls, key=lambda x: spec.psi[x])
        assert all(best in step.stop_set for step in r.trace)
