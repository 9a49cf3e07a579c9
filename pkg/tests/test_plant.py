import math

import numpy as np
import pytest

from tlfrls.plant import (
    PUBLISHED_THETA,
    ChangeSchedule,
    InputSignal,
    PlantModel,
    SimHistory,
    arx_step,
    input_signal,
    paper_theta,
    schedule_theta,
    simulate,
)


def test_published_vectors():
    np.testing.assert_array_equal(paper_theta("a").theta_true, [1.6405, -0.8187, 0.4606, 0.4307])
    np.testing.assert_array_equal(paper_theta("b").theta_true, [0.3116, -0.9980, 0.4218, 0.4215])
    np.testing.assert_array_equal(paper_theta("c").theta_true, [1.1267, -0.1353, 0.2834, 0.1482])
    with pytest.raises(ValueError):
        paper_theta("d")


def test_plant_model_validation():
    with pytest.raises(ValueError):
        PlantModel(np.ones(3), "x")
    with pytest.raises(ValueError):
        PlantModel(np.array([1.0, np.nan, 0.0, 0.0]), "x")


def test_input_signal():
    assert input_signal(0) == 0.0
    assert input_signal(10) == pytest.approx(0.841471, abs=5e-7)
    with pytest.raises(ValueError):
        input_signal(-1)
    assert InputSignal()(10) == input_signal(10)
    assert InputSignal(2.0, 0.0, 1.0)(7) == 1.0


def test_arx_step_examples():
    y, hist, phi = arx_step(paper_theta("a"), SimHistory(1.0, 0.0, 0.0, 0.0), 0.5)
    assert y == 1.6405
    np.testing.assert_array_equal(phi, [1.0, 0.0, 0.0, 0.0])
    assert hist == SimHistory(1.6405, 1.0, 0.5, 0.0)
    y, *_ = arx_step(paper_theta("b"), SimHistory(0.0, 0.0, 1.0, 1.0), 0.0)
    assert y == pytest.approx(0.8433, abs=1e-15)


def test_zero_input_stays_at_rest():
    stream = simulate(ChangeSchedule.from_labels([(0, "a")]), 50, InputSignal(amplitude=0.0))
    assert not stream.y_next.any() and not stream.phi.any()


def test_schedule_boundaries():
    sched = ChangeSchedule.from_labels([(0, "a"), (200, "b"), (1200, "c")])
    assert [schedule_theta(sched, k).label for k in (0, 199, 200, 1199, 1200, 5000)] == ["a", "a", "b", "b", "c", "c"]
    with pytest.raises(ValueError):
        ChangeSchedule.from_labels([(5, "a")])
    with pytest.raises(ValueError):
        ChangeSchedule.from_labels([(0, "a"), (10, "b"), (10, "c")])
    overridden = ChangeSchedule.from_labels([(0, "a")], {"a": (1, 0, 0, 0)})
    np.testing.assert_array_equal(overridden.entries[0][1].theta_true, [1, 0, 0, 0])


def test_simulate_layout_and_carry_over():
    sched = ChangeSchedule.from_labels([(0, "a"), (5, "b")])
    stream = simulate(sched, 10)
    assert len(stream) == 10
    # Row k: phi(k) produced y(k+1) under the model active at k.
    for k in range(10):
        np.testing.assert_allclose(stream.phi[k] @ stream.theta_true[k], stream.y_next[k], rtol=0, atol=1e-15)
    np.testing.assert_array_equal(stream.theta_true[4], PUBLISHED_THETA["a"])
    np.testing.assert_array_equal(stream.theta_true[5], PUBLISHED_THETA["b"])
    # History carries across the switch.
    assert stream.phi[5][0] == stream.y_next[4]
    assert stream.phi[5][1] == stream.y_next[3]
    assert stream.phi[0][2] == 0.0 and stream.phi[1][2] == pytest.approx(math.sin(0.1))
    with pytest.raises(ValueError):
        stream.phi[0, 0] = 1.0


def test_overflow_flag_is_sticky():
    unstable = PlantModel(np.array([3.0, 0.0, 1.0, 0.0]), "a")
    stream = simulate(ChangeSchedule.constant(unstable), 60)
    first = int(np.argmax(stream.overflow))
    assert stream.overflow[first] and stream.overflow[first:].all() and not stream.overflow[:first].any()
