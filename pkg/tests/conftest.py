import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from fakemark.sample import sample_table
from fakemark.store import Schema, Table


@pytest.fixture
def flights():
    schema = Schema(("flight", "department", "day", "time"))
    rows = [
        ("Z0702", "London", "Saturday", "18:20"),
        ("E0823", "Tokyo", "Friday", "22:15"),
        ("L0620", "Sydney", "Sunday", "11:55"),
        ("B1406", "Rome", "Thursday", "13:10"),
        ("K3321", "Paris", "Monday", "07:05"),
        ("A1190", "Dubai", "Tuesday", "16:40"),
    ]
    return Table(schema, tuple(rows))


@pytest.fixture(scope="session")
def small_sample():
    return sample_table(400, seed=3)


@pytest.fixture(scope="session")
def full_table():
    return sample_table(10_000, seed=0)


class MockGenerator:
    """Scripted stand-in for an external text-generation service."""

    def __init__(self):
        self.requests = []
        self.reply = None  # callable(request_doc) -> (status, body)

    def __call__(self, doc):
        self.requests.append(doc)
        return self.reply(doc)


@pytest.fixture
def mock_service():
    behaviour = MockGenerator()

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            doc = json.loads(self.rfile.read(length))
            status, body = behaviour(doc)
            payload = body if isinstance(body, bytes) else json.dumps(body).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):
            pass

    server = HTTPServer(("127.0.0.1", 0), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    behaviour.url = f"http://127.0.0.1:{server.server_address[1]}/generate"
    yield behaviour
    server.shutdown()
    server.server_close()


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
