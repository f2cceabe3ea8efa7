import pandas as pd
import pytest

from Kurepa_py.utils import ReportFormat, Utility


@pytest.fixture
def frame():
    return pd.DataFrame({"n": [7, 11563], "ratio": [0.25, 1 / 3]})


def test_format_real():
    assert Utility.format_real(30.897695) == "30.8977"
    assert Utility.format_real(30.897695, precision=3) == "30.9"


def test_render_csv(frame):
    assert Utility.render(frame, "csv").splitlines()[0] == "n,ratio"
    assert Utility.render(frame, ReportFormat.CSV, header=False).splitlines()[0] == "7,0.25"


def test_render_json(frame):
    lines = Utility.render(frame, ReportFormat.JSON).splitlines()
    assert lines[0] == '{"n":7,"ratio":0.25}'
    assert len(lines) == 2


def test_render_pretty(frame):
    lines = Utility.render(frame, ReportFormat.PRETTY, precision=3).splitlines()
    assert lines[0].split() == ["n", "ratio"]
    assert lines[2].split() == ["11563", "0.333"]


def test_render_rejects_unknown_format(frame):
    with pytest.raises(ValueError):
        Utility.render(frame, "xml")
