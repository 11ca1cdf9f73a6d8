"""Run the docstring examples shipped with the library."""
from __future__ import annotations

import doctest

import petriglue.net_model


def test_net_model_doctests():
    result = doctest.testmod(petriglue.net_model)
    assert result.attempted > 0
    assert result.failed == 0
