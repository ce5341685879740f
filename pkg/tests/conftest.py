"""Shared session fixtures: the bundled case and datasets generated from it."""
from __future__ import annotations

from typing import Dict, List

import pytest

from railcal.fixtures import build_fixture
from railcal.synth import SCENARIOS, generate_dataset, load_target

_ACCEPTANCE_LINES: List[str] = []


@pytest.fixture(scope="session")
def acceptance_log() -> List[str]:
    """Sink for the one-line verdicts printed after the run."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixture_build(tmp_path_factory) -> Dict[str, object]:
    out = tmp_path_factory.mktemp("case")
    return build_fixture(str(out))


@pytest.fixture(scope="session")
def fixture_dir(fixture_build) -> str:
    return str(fixture_build["directory"])


@pytest.fixture(scope="session")
def dataset_dir(tmp_path_factory, fixture_dir) -> str:
    out = tmp_path_factory.mktemp("dataset_reference")
    generate_dataset(fixture_dir, str(out), scenario="reference", seed=0)
    return str(out)


@pytest.fixture(scope="session")
def scenario_datasets(tmp_path_factory, fixture_dir, dataset_dir) -> Dict[str, str]:
    dirs = {"reference": dataset_dir}
    for name in SCENARIOS:
        if name != "reference":
            out = tmp_path_factory.mktemp(f"dataset_{name}")
            generate_dataset(fixture_dir, str(out), scenario=name, seed=0)
            dirs[name] = str(out)
    return dirs


@pytest.fixture(scope="session")
def reference_target(dataset_dir):
    """(CalibrationTarget, manifest) for the reference dataset."""
    return load_target(dataset_dir)
