"""Shared fixtures: every test runs offline with sockets disabled."""

import socket
import time

import pytest

from ssdefect.lmfdb import CACHE_ENV, OFFLINE_ENV

# criterion id -> (passed, detail); filled in by test_acceptance
ACCEPTANCE: dict[str, tuple[bool, str]] = {}
_START = time.monotonic()
SUITE_LIMIT = 120


class _NoNetwork(RuntimeError):
    pass


def _blocked(*args, **kwargs):
    raise _NoNetwork("network access attempted during tests")


@pytest.fixture(autouse=True)
def _hermetic(monkeypatch, tmp_path):
    monkeypatch.setenv(OFFLINE_ENV, "1")
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "cache"))
    monkeypatch.setattr(socket.socket, "connect", _blocked)
    monkeypatch.setattr(socket, "create_connection", _blocked)
    monkeypatch.setattr(socket, "getaddrinfo", _blocked)
    yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[key]
        tr.write_line(f"{key:>4} {'PASS' if ok else 'FAIL'}  {detail}")
    wall = time.monotonic() - _START
    tr.write_line(f"suite {'PASS' if wall < SUITE_LIMIT else 'FAIL'}  {wall:.1f} s wall time (limit {SUITE_LIMIT} s), sockets blocked")
