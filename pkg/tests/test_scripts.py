"""Smoke runs of the experiment scripts at small sizes."""
import runpy
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).parent.parent / "scripts"


@pytest.mark.parametrize("name,argv,expect", [
    ("density_scan", ["--bounds", "50"], "expected 0.500"),
    ("coverage_scan", ["--bound", "1"], "rejected for the zero type"),
    ("rigidity_demo", ["--seeds", "1", "2", "--pmax", "50"], "zero only"),
])
def test_script_runs(name, argv, expect, capsys):
    main = runpy.run_path(str(SCRIPTS / f"{name}.py"))["main"]
    main(argv)
    assert expect in capsys.readouterr().out
