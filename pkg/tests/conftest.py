import json

import pytest

from planspace import fixtures


@pytest.fixture(scope="session")
def talk():
    return fixtures.talk_task()


@pytest.fixture(scope="session")
def talk_ops(talk):
    return talk.operator_index


@pytest.fixture()
def talk_file(talk, tmp_path):
    path = tmp_path / "talk.json"
    path.write_text(json.dumps(talk.to_dict()))
    return str(path)
