"""Admin credential and session behaviour, direct and over HTTP."""

from datetime import timedelta

import pytest
from fastapi.testclient import TestClient

from portal_harvester.service import create_app
from tests.conftest import EPOCH


@pytest.fixture
def client(registry, store, fixture_fetcher, policy, clock):
    store.create_admin("admin", "correct horse", EPOCH)
    app = create_app(registry, store, fixture_fetcher, policy, clock=clock)
    with TestClient(app, raise_server_exceptions=False) as c:
        c.clock = clock
        yield c


def login(client, username="admin", password="correct horse"):
    return client.post("/api/admin/login",
                       json={"username": username, "password": password})


def test_good_credentials_issue_token(client):
    response = login(client)
    assert response.status_code == 200
    body = response.json()
    assert len(body["token"]) >= 32
    assert "expires_at" in body


def test_wrong_password_rejected(client):
    assert login(client, password="wrong").status_code == 401


def test_unknown_user_indistinguishable(client):
    wrong = login(client, password="wrong")
    ghost = login(client, username="nobody", password="wrong")
    assert wrong.status_code == ghost.status_code == 401
    assert wrong.json() == ghost.json()


def test_token_grants_access(client):
    token = login(client).json()["token"]
    response = client.get("/api/admin/scrapes",
                          headers={"Authorization": f"Bearer {token}"})
    assert response.status_code == 200


def test_garbage_token_rejected(client):
    response = client.get("/api/admin/scrapes",
                          headers={"Authorization": "Bearer forged"})
    assert response.status_code == 401


def test_token_expires(client):
    token = login(client).json()["token"]
    client.clock.advance(hours=1)
    client.clock.advance(seconds=1)
    response = client.get("/api/admin/scrapes",
                          headers={"Authorization": f"Bearer {token}"})
    assert response.status_code == 401


def test_password_change_invalidates_old_secret(store, clock):
    store.create_admin("admin", "first", EPOCH)
    store.create_admin("admin", "second", EPOCH + timedelta(minutes=1))
    later = EPOCH + timedelta(minutes=2)
    assert store.authenticate_admin("admin", "first", later) is None
    assert store.authenticate_admin("admin", "second", later) is not None
