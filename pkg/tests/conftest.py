import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = CORPUS / "golden"

CORPUS_NAMES = [
    "excluded_middle",
    "client_server_request",
    "client_server_dialogue",
    "cyclic",
    "channel_transmission",
]


@pytest.fixture(scope="session")
def corpus_dir() -> pathlib.Path:
    return CORPUS


@pytest.fixture(scope="session")
def golden_dir() -> pathlib.Path:
    return GOLDEN


def corpus_text(name: str) -> str:
    return (CORPUS / f"{name}.lamp").read_text(encoding="utf-8")
