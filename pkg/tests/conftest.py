import pytest

from descriptors import THREE_SERVER_BALANCED_XML, THREE_SERVER_XML, TWO_SERVER_XML
from xdgdl import parse_document


@pytest.fixture(scope="session")
def two_server_doc():
    return parse_document(TWO_SERVER_XML)


@pytest.fixture(scope="session")
def three_server_doc():
    return parse_document(THREE_SERVER_XML)


@pytest.fixture(scope="session")
def balanced_doc():
    return parse_document(THREE_SERVER_BALANCED_XML)
