from pathlib import Path

import pytest

from reliefmatch import annotations, geo, lexicons

FIXTURES = Path(__file__).parent / "fixtures"

NEPAL_BOX = geo.BoundingBox(26.35, 30.45, 80.06, 88.20)
ITALY_BOX = geo.BoundingBox(36.60, 47.10, 6.60, 18.50)
CHENNAI_BOX = geo.BoundingBox(12.83, 13.25, 80.00, 80.35)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def lex_oracle():
    return lexicons.load_lexicons()


@pytest.fixture(scope="session")
def lex(lex_oracle):
    return lex_oracle[0]


@pytest.fixture(scope="session")
def oracle(lex_oracle):
    return lex_oracle[1]


@pytest.fixture(scope="session")
def gazetteer():
    return geo.Gazetteer(fixture_path=FIXTURES / "gazetteer.tsv", box=NEPAL_BOX)


@pytest.fixture(scope="session")
def gazetteer_italy():
    return geo.Gazetteer(fixture_path=FIXTURES / "gazetteer.tsv", box=ITALY_BOX)


@pytest.fixture(scope="session")
def table6_bundles():
    return annotations.load_annotated(FIXTURES / "annotated_table6.jsonl")


@pytest.fixture(scope="session")
def extra_bundles():
    got = annotations.load_annotated(FIXTURES / "annotated_extra.jsonl")
    return {b.tweet_id: b for b in got}
