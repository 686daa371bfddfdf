import shutil
from pathlib import Path

import pytest

import flowlens as fl
from flowlens.datagen import write_flights_csv

FIXTURE_DIR = Path(__file__).parent / "fixtures"
SPEC_DIR = FIXTURE_DIR / "specs"
DATA_DIR = FIXTURE_DIR / "data"

SMALL_FLIGHTS_ROWS = 2000
BIG_FLIGHTS_ROWS = 200_000

# one signal update per fixture that has signals, used wherever tests need
# a second pulse
FIXTURE_EVENTS = {
    "filter_signal": [("cutoff", 30), ("cutoff", 5)],
    "formula_line": [("gain", 5)],
    "extent_bin": [("binstep", 3)],
    "multi_dataset": [("dot_size", 160)],
    "signals_axes": [("unused", False)],
    "fig4": [("binstep", 250)],
    "fig4_nomarks": [("binstep", 250)],
    "fig4_inline": [("binstep", 250)],
}


def fixture_names():
    return sorted(p.stem for p in SPEC_DIR.glob("*.json"))


def fixture_text(name: str) -> str:
    return (SPEC_DIR / f"{name}.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def spec_dir(tmp_path_factory) -> Path:
    """Fixture specs, committed data files, and a small flights.csv in
    one directory, so specs resolve urls next to themselves."""
    d = tmp_path_factory.mktemp("specs")
    for p in SPEC_DIR.glob("*.json"):
        shutil.copy(p, d / p.name)
    for p in DATA_DIR.iterdir():
        shutil.copy(p, d / p.name)
    write_flights_csv(d / "flights.csv", SMALL_FLIGHTS_ROWS)
    return d


@pytest.fixture(scope="session")
def big_data_dir(tmp_path_factory) -> Path:
    d = tmp_path_factory.mktemp("bigdata")
    write_flights_csv(d / "flights.csv", BIG_FLIGHTS_ROWS)
    return d


@pytest.fixture(scope="session")
def make_session(spec_dir):
    def make(name: str, run: bool = False) -> fl.Session:
        session = fl.Session.from_text(fixture_text(name), spec_dir)
        if run:
            session.run_initial()
            for signal, value in FIXTURE_EVENTS.get(name, ()):
                session.apply_event(signal, value)
        return session

    return make
