"""Records the distinct-city-count session against the live HTTP API into a
replay fixture the frontend tests serve from a mock fetch.

Run from the repository root: python3 frontend/record_fixture.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from summar_guard.service import create_app

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "sessions" / "data"

recording: list[dict] = []


def record(client, method, path, *, json_body=None):
    if method.upper() == "GET":
        resp = client.get(path)
    else:
        resp = client.post(path, json=json_body)
    entry = {
        "method": method.upper(),
        "path": path,
        "status": resp.status_code,
        "response": resp.json(),
    }
    if json_body is not None:
        entry["body"] = json_body
    recording.append(entry)
    return resp


def upload(client, sid, name, kind, csv_path, **decl):
    declaration = {"name": name, "kind": kind, **decl}
    resp = client.post(
        f"/sessions/{sid}/tables",
        files={"csv": (f"{name}.csv", csv_path.read_bytes(), "text/csv")},
        data={"declaration": json.dumps(declaration)},
    )
    recording.append({
        "method": "POST",
        "path": f"/sessions/{sid}/tables",
        "status": resp.status_code,
        "response": resp.json(),
        "body": {"declaration": declaration, "csv": csv_path.name},
    })
    return resp


def main():
    client = TestClient(create_app())
    sid = record(client, "POST", "/sessions",
                 json_body={"mode": "sum"}).json()["session_id"]
    upload(client, sid, "REGION", "dimension", DATA / "region.csv",
           hierarchy=[["City", "State"], ["State", "Country"],
                      ["Country", "Region"]],
           nullable=["State"])
    upload(client, sid, "TIME", "dimension", DATA / "time.csv", attrs=["Year"])
    upload(client, sid, "DEM", "fact", DATA / "dem.csv",
           dims={"REGION": ["City", "State", "Country"], "TIME": ["Year"]},
           measures={"Pop": "NUM", "Unemp": "STAT"},
           overrides={"Pop": {"x_f": ["Year"]}})
    record(client, "GET", f"/sessions/{sid}")
    record(client, "GET", f"/sessions/{sid}/nodes/DEM/properties")
    record(client, "POST", f"/sessions/{sid}/query", json_body={
        "spec": {"op": "aggregate", "fn": "COUNTDISTINCT", "attr": "City",
                 "by": ["Country", "State"], "as": "NB_CITIES"},
        "inputs": ["DEM"], "alias": "T1"})
    record(client, "GET", f"/sessions/{sid}")
    record(client, "GET", f"/sessions/{sid}/nodes/T1/properties")
    record(client, "GET", f"/sessions/{sid}/nodes/T1/rows?limit=100&offset=0")
    record(client, "GET", f"/sessions/{sid}/nodes/T1/explain/NB_CITIES")
    # the grouping the properties do allow
    record(client, "POST", f"/sessions/{sid}/query", json_body={
        "spec": {"op": "aggregate", "fn": "SUM", "attr": "NB_CITIES",
                 "by": ["Country", "State"], "as": "CHECK"},
        "inputs": ["T1"], "alias": "TCHECK"})
    record(client, "GET", f"/sessions/{sid}")
    # the forbidden follow-up: summing distinct counts per country
    record(client, "POST", f"/sessions/{sid}/query", json_body={
        "spec": {"op": "aggregate", "fn": "SUM", "attr": "NB_CITIES",
                 "by": ["Country"]},
        "inputs": ["T1"]})
    # the backtrack shortcut from the rejection dialog
    record(client, "POST", f"/sessions/{sid}/focus", json_body={"node": "DEM"})
    record(client, "GET", f"/sessions/{sid}")
    record(client, "GET", f"/sessions/{sid}/graphs/REGION?format=json")

    out = Path(__file__).resolve().parent / "fixtures" / "fig1_recorded.json"
    out.write_text(json.dumps({"session_id": sid, "exchanges": recording},
                              indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"recorded {len(recording)} exchanges to {out}")


if __name__ == "__main__":
    main()
