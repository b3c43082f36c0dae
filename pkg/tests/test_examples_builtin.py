"""Every built-in example's stored report matches a fresh run, byte for byte."""

import pathlib

import pytest

from logsing import pipeline
from logsing.examples import BUILTIN, get_example, list_examples

DATA = pathlib.Path(__file__).parent / "data"

PLAN = {name: ("analyze" if name == "m4-l1" else "solve")
        for name in BUILTIN}


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtin_report_frozen(name):
    cmd = PLAN[name]
    text = pipeline.example_input_text(name)
    doc = pipeline.cmd_analyze(text) if cmd == "analyze" \
        else pipeline.cmd_solve(text)
    stored = (DATA / f"{name}.{cmd}.json").read_text()
    assert pipeline.to_json(doc) == stored


def test_listing_is_complete_and_ordered():
    # catalog order runs simple to advanced and is part of the interface
    names = [e["name"] for e in list_examples()]
    assert names == list(BUILTIN)
    assert set(names) == set(BUILTIN)
    for entry in list_examples():
        assert entry["title"]
        assert entry["source"].startswith("D[t,")


def test_get_example_unknown_name():
    from logsing.errors import ConfigurationError
    with pytest.raises(ConfigurationError):
        get_example("no-such-example")


def test_example_input_text_is_runnable():
    for name in BUILTIN:
        text = pipeline.example_input_text(name)
        header, eq = pipeline.split_input(text)
        assert eq.startswith("D[t,")


def test_wave_speed_one_rejected():
    from logsing.errors import ConfigurationError
    from logsing.examples import wave_reduced_source
    from fractions import Fraction
    with pytest.raises(ConfigurationError):
        wave_reduced_source(Fraction(1))
