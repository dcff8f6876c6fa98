import numpy as np
import pytest

from gsdalloc.levels import (
    LEVEL_IMAGES,
    LEVEL_NAMES,
    Level,
    N_LEVELS,
    value_image,
    value_level,
)


def test_images_are_quarter_steps():
    assert [lv.image for lv in Level] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert np.array_equal(LEVEL_IMAGES, np.array([0.0, 0.25, 0.5, 0.75, 1.0]))


def test_inversion_mirrors_scale():
    assert Level.VERY_LOW.invert() is Level.VERY_HIGH
    assert Level.LOW.invert() is Level.HIGH
    assert Level.MEDIUM.invert() is Level.MEDIUM
    for lv in Level:
        assert lv.invert().invert() is lv
        assert lv.invert().image == pytest.approx(1.0 - lv.image)


def test_names_round_trip():
    assert N_LEVELS == 5
    for name in LEVEL_NAMES:
        assert Level.from_name(name).label == name
    assert Level.from_name("HIGH") is Level.HIGH
    with pytest.raises(ValueError):
        Level.from_name("sky_high")


def test_boolean_embedding():
    assert value_image(True) == 1.0
    assert value_image(False) == 0.0
    assert value_level(True) is Level.VERY_HIGH
    assert value_level(False) is Level.VERY_LOW
    assert value_level(Level.MEDIUM) is Level.MEDIUM
    assert value_image(Level.LOW) == 0.25


def test_non_values_rejected():
    with pytest.raises(TypeError):
        value_image("high")
    with pytest.raises(TypeError):
        value_level(3.5)
