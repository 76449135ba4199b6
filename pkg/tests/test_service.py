import pytest
from fastapi.testclient import TestClient

from veriodd.engine import SolverConfig
from veriodd.service import ServiceSettings, create_app


@pytest.fixture(scope="module")
def client(solver_config):
    app = create_app(ServiceSettings(solver=solver_config, max_concurrent=2))
    with TestClient(app) as test_client:
        yield test_client


MODULES = ["parking_lot_conditions"]


def test_parse_running_example(client, parking_odd_text, parking_cod_text):
    response = client.post("/api/parse", json={"odd": parking_odd_text,
                                               "cod": parking_cod_text})
    assert response.status_code == 200
    body = response.json()
    assert [m["name"] for m in body["modules"]] == [
        "supported_parking_lot_conditions",
        "unsupported_parking_lot_conditions",
        "parking_lot_conditions",
    ]
    assert body["modules"][2]["references"] == [
        "supported_parking_lot_conditions",
        "unsupported_parking_lot_conditions",
    ]
    attributes = {a["name"]: a for a in body["attributes"]}
    assert attributes["parking_lot_length"]["sort"] == "Int"
    assert attributes["parking_lot_length"]["unit"] == "m"
    assert "unit" not in attributes["is_curve"]
    assert [o["name"] for o in body["observations"]] == [
        "parking_lot_length", "is_curve", "surface", "location"]


def test_parse_malformed_returns_400_with_diagnostics(client):
    response = client.post("/api/parse",
                           json={"odd": "m:\n  FOO_AND:\n    x: true\n"})
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "ParseError"
    assert body["diagnostics"]
    assert body["diagnostics"][0]["line"] == 2


def test_parse_sort_conflict_code(client):
    text = "a:\n  INCLUDE_AND:\n    v: > 5\nb:\n  INCLUDE_AND:\n    v: true\n"
    response = client.post("/api/parse", json={"odd": text})
    assert response.status_code == 400
    assert response.json()["code"] == "SortError"


def test_empty_odd_parses_to_empty_lists(client):
    response = client.post("/api/parse", json={"odd": ""})
    assert response.status_code == 200
    assert response.json() == {"modules": [], "attributes": []}


def test_compile_both_targets(client, parking_odd_text, parking_cod_text,
                              parking_odd, parking_cod):
    from veriodd import (emit_cod_prop, emit_cod_smtlib, emit_odd_prop,
                         emit_odd_smtlib)

    response = client.post("/api/compile", json={
        "odd": parking_odd_text, "cod": parking_cod_text, "target": "smtlib"})
    assert response.status_code == 200
    assert response.json() == {"oddText": emit_odd_smtlib(parking_odd),
                               "codText": emit_cod_smtlib(parking_cod)}

    response = client.post("/api/compile", json={
        "odd": parking_odd_text, "cod": parking_cod_text, "target": "prop"})
    assert response.json() == {"oddText": emit_odd_prop(parking_odd),
                               "codText": emit_cod_prop(parking_cod)}


def test_compile_bad_target(client, parking_odd_text):
    response = client.post("/api/compile", json={"odd": parking_odd_text,
                                                 "target": "latex"})
    assert response.status_code == 400
    assert response.json()["code"] == "BadRequest"


def test_verify_violation(client, parking_odd_text, parking_cod_text):
    response = client.post("/api/verify", json={
        "odd": parking_odd_text, "cod": parking_cod_text, "modules": MODULES})
    assert response.status_code == 200
    body = response.json()
    assert body["verdict"] == "violation"
    assert body["wallMs"] > 0
    assert "(assert parking_lot_conditions)" in body["script"]


def test_check_consistent_with_model(client, parking_odd_text):
    response = client.post("/api/check", json={
        "odd": parking_odd_text, "modules": MODULES, "model": True})
    assert response.status_code == 200
    body = response.json()
    assert body["verdict"] == "consistent"
    assert body["model"] is not None
    assert "parking_lot_length" in body["model"]


def test_check_unknown_module(client, parking_odd_text):
    response = client.post("/api/check", json={
        "odd": parking_odd_text, "modules": ["ghost"]})
    assert response.status_code == 400
    assert response.json()["code"] == "UnknownModule"


def test_check_empty_selection(client, parking_odd_text):
    response = client.post("/api/check", json={
        "odd": parking_odd_text, "modules": []})
    assert response.status_code == 400
    assert response.json()["code"] == "BadRequest"


def test_batch_endpoint(client, parking_odd_text, parking_cod_text):
    stream = "---\n".join([parking_cod_text] * 3)
    response = client.post("/api/batch", json={
        "odd": parking_odd_text, "cods": stream, "modules": MODULES})
    assert response.status_code == 200
    body = response.json()
    assert [row["verdict"] for row in body["rows"]] == ["violation"] * 3
    assert body["totals"]["count"] == 3
    assert body["totals"]["totalMs"] >= body["totals"]["maxMs"]


def test_health(client, solver_config):
    response = client.get("/api/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["solver"]["path"] == solver_config.executable
    assert body["solver"]["reachable"] is True


def test_health_reports_unreachable_solver():
    settings = ServiceSettings(
        solver=SolverConfig(executable="/nonexistent/z9"))
    with TestClient(create_app(settings)) as client:
        body = client.get("/api/health").json()
    assert body["solver"]["reachable"] is False


def test_solver_failure_returns_502(parking_odd_text):
    settings = ServiceSettings(
        solver=SolverConfig(executable="/nonexistent/z9"))
    with TestClient(create_app(settings)) as client:
        response = client.post("/api/check", json={
            "odd": parking_odd_text, "modules": MODULES})
    assert response.status_code == 502
    assert response.json()["code"] == "SolverError"


def test_timeout_returns_504(tmp_path, parking_odd_text):
    import stat

    slow = tmp_path / "slow.sh"
    slow.write_text("#!/bin/sh\nsleep 30\necho sat\n")
    slow.chmod(slow.stat().st_mode | stat.S_IEXEC)
    settings = ServiceSettings(
        solver=SolverConfig(executable=str(slow), timeout_ms=200))
    with TestClient(create_app(settings)) as client:
        response = client.post("/api/check", json={
            "odd": parking_odd_text, "modules": MODULES})
    assert response.status_code == 504
    assert response.json()["code"] == "Timeout"


def test_statelessness_identical_requests(client, parking_odd_text,
                                          parking_cod_text):
    payload = {"odd": parking_odd_text, "cod": parking_cod_text,
               "modules": MODULES}
    first = client.post("/api/verify", json=payload).json()
    second = client.post("/api/verify", json=payload).json()
    assert first["verdict"] == second["verdict"]
    assert first["script"] == second["script"]


def test_cli_api_parity(client, parking_odd_text, parking_cod_text, tmp_path,
                        capsys):
    from veriodd.cli import main

    odd_path = tmp_path / "odd.yaml"
    cod_path = tmp_path / "cod.yaml"
    odd_path.write_text(parking_odd_text)
    cod_path.write_text(parking_cod_text)

    for modules in (["parking_lot_conditions"],
                    ["supported_parking_lot_conditions"]):
        main(["verify", "--odd", str(odd_path), "--cod", str(cod_path),
              "--modules", ",".join(modules)])
        cli_verdict = capsys.readouterr().out.strip().splitlines()[0]
        api_verdict = client.post("/api/verify", json={
            "odd": parking_odd_text, "cod": parking_cod_text,
            "modules": modules}).json()["verdict"]
        assert cli_verdict == api_verdict

    main(["check", "--odd", str(odd_path),
          "--modules", "parking_lot_conditions"])
    cli_verdict = capsys.readouterr().out.strip().splitlines()[0]
    api_verdict = client.post("/api/check", json={
        "odd": parking_odd_text,
        "modules": ["parking_lot_conditions"]}).json()["verdict"]
    assert cli_verdict == api_verdict
