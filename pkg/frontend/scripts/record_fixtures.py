"""Record HTTP fixtures for the frontend tests from the real service.

Runs a deterministic session flow (create -> 3 preferences -> next
batch) in-process and dumps every response body to
frontend/tests/fixtures/.  Re-run after changing service behavior:

    python3 frontend/scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from gencurate import service

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

CREATE_BODY = {
    "problem": "gauss1d",
    "sigma": 1.5,
    "m": 5,
    "seed": 11,
    "kernel": {"variant": "sqexp", "h": 0.1},
}


def dump(name, payload):
    path = FIXTURE_DIR / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(FIXTURE_DIR.parent.parent)}")


def distinct_pairs(candidates):
    """Index pairs with different actions, in deterministic order."""
    out = []
    for i in range(len(candidates)):
        for j in range(i + 1, len(candidates)):
            if candidates[i]["action"] != candidates[j]["action"]:
                out.append((candidates[i]["index"], candidates[j]["index"]))
    return out


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    client = TestClient(service.create_app())

    created = client.post("/sessions", json=CREATE_BODY).json()
    dump("session_created", created)
    sid = created["session_id"]

    dump("session_state", client.get(f"/sessions/{sid}").json())
    dump("candidates_initial", client.get(f"/sessions/{sid}/candidates").json())
    dump("posterior_initial", client.get(f"/sessions/{sid}/posterior").json())

    pairs = distinct_pairs(created["candidates"])[:3]
    assert len(pairs) == 3, f"need 3 distinct pairs, got {pairs}"
    for k, (winner, loser) in enumerate(pairs, start=1):
        summary = client.post(
            f"/sessions/{sid}/preferences", json={"winner": winner, "loser": loser}
        ).json()
        dump(f"preference_{k}", summary)
        dump(f"posterior_after_{k}", client.get(f"/sessions/{sid}/posterior").json())

    dump("batch_1", client.post(f"/sessions/{sid}/next-batch").json())
    dump("candidates_after_batch", client.get(f"/sessions/{sid}/candidates").json())
    dump("session_state_final", client.get(f"/sessions/{sid}").json())

    error = client.get("/sessions/no-such-session")
    dump("error_unknown_session", error.json())

    dump(
        "meta",
        {
            "create_body": CREATE_BODY,
            "preferences": [list(p) for p in pairs],
            "session_id": sid,
        },
    )


if __name__ == "__main__":
    main()
