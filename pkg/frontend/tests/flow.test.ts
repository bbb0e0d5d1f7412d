/** Scripted session flow against the recorded transcript: start, three
 * preferences, next batch.  Asserts the posterior band narrows at every
 * compared point — on band-width values from the data model. */

import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { SessionModel, toPosteriorView } from "../src/model.js";

import batch1 from "./fixtures/batch_1.json";
import candidatesAfterBatch from "./fixtures/candidates_after_batch.json";
import errorUnknown from "./fixtures/error_unknown_session.json";
import meta from "./fixtures/meta.json";
import posteriorAfter1 from "./fixtures/posterior_after_1.json";
import posteriorAfter2 from "./fixtures/posterior_after_2.json";
import posteriorAfter3 from "./fixtures/posterior_after_3.json";
import posteriorInitial from "./fixtures/posterior_initial.json";
import preference1 from "./fixtures/preference_1.json";
import preference2 from "./fixtures/preference_2.json";
import preference3 from "./fixtures/preference_3.json";
import sessionCreated from "./fixtures/session_created.json";
import sessionStateFinal from "./fixtures/session_state_final.json";

interface Step {
  method: string;
  path: string;
  status?: number;
  payload: unknown;
}

/** Fetch stub that replays the recorded transcript in strict order. */
function scriptedFetch(steps: Step[]) {
  const queue = [...steps];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    const step = queue.shift();
    if (!step) throw new Error(`unexpected request ${init?.method} ${url}`);
    expect(`${init?.method ?? "GET"} ${url}`).toBe(`${step.method} ${step.path}`);
    return {
      ok: (step.status ?? 200) < 400,
      status: step.status ?? 200,
      statusText: "",
      json: async () => step.payload,
    } as Response;
  };
  return { fetchFn, queue };
}

const SID = meta.session_id;
const PAIRS = meta.preferences as [number, number][];

function transcript(): Step[] {
  return [
    { method: "POST", path: "/sessions", status: 201, payload: sessionCreated },
    { method: "GET", path: `/sessions/${SID}/posterior`, payload: posteriorInitial },
    { method: "POST", path: `/sessions/${SID}/preferences`, payload: preference1 },
    { method: "GET", path: `/sessions/${SID}/posterior`, payload: posteriorAfter1 },
    { method: "POST", path: `/sessions/${SID}/preferences`, payload: preference2 },
    { method: "GET", path: `/sessions/${SID}/posterior`, payload: posteriorAfter2 },
    { method: "POST", path: `/sessions/${SID}/preferences`, payload: preference3 },
    { method: "GET", path: `/sessions/${SID}/posterior`, payload: posteriorAfter3 },
    { method: "POST", path: `/sessions/${SID}/next-batch`, payload: batch1 },
  ];
}

describe("start -> 3 preferences -> next batch", () => {
  it("completes with the band narrowed at every compared point", async () => {
    const { fetchFn, queue } = scriptedFetch(transcript());
    const model = new SessionModel(new ApiClient("", fetchFn));

    await model.start(meta.create_body);
    expect(model.sessionId).toBe(SID);
    expect(model.latestBatchCards()).toHaveLength(meta.create_body.m);

    const before = toPosteriorView(posteriorInitial);
    const widthBefore = new Map<number, number>();
    const actionOf = new Map(
      sessionCreated.candidates.map((c) => [c.index, c.action]),
    );
    for (const [w, l] of PAIRS) {
      for (const idx of [w, l]) {
        widthBefore.set(idx, model.bandWidthAt(actionOf.get(idx)!));
      }
    }
    expect([...widthBefore.values()]).toEqual(
      [...widthBefore.keys()].map((idx) => {
        let best = 0;
        let dist = Infinity;
        before.grid.forEach((g, i) => {
          const d = (g[0] - actionOf.get(idx)![0]) ** 2;
          if (d < dist) {
            dist = d;
            best = i;
          }
        });
        return before.bandWidth[best];
      }),
    );

    for (const [w, l] of PAIRS) {
      expect(await model.prefer(w, l)).toBe(true);
    }
    expect(model.history).toEqual(PAIRS.map(([w, l]) => ({ winner: w, loser: l })));

    expect(await model.nextBatch()).toBe(true);
    expect(model.batches).toHaveLength(2);
    expect(model.batches[1]).toEqual(
      batch1.candidates.map((c: { index: number }) => c.index),
    );
    expect(model.candidates.map((c) => c.index)).toEqual(
      candidatesAfterBatch.candidates.map((c: { index: number }) => c.index),
    );

    for (const [idx, before_w] of widthBefore) {
      const after_w = model.bandWidthAt(actionOf.get(idx)!);
      expect(after_w).toBeLessThan(before_w);
    }
    expect(queue).toHaveLength(0);
  });

  it("blocks self-comparison and debounces double submits", async () => {
    const { fetchFn, queue } = scriptedFetch(transcript());
    const model = new SessionModel(new ApiClient("", fetchFn));
    await model.start(meta.create_body);

    expect(await model.prefer(2, 2)).toBe(false);
    expect(queue).toHaveLength(transcript().length - 2);

    const [w, l] = PAIRS[0];
    const first = model.prefer(w, l);
    const second = model.prefer(PAIRS[1][0], PAIRS[1][1]); // while in flight
    expect(await second).toBe(false);
    expect(await first).toBe(true);
    expect(model.history).toHaveLength(1);
  });

  it("restores an equal view from the service after a refresh", async () => {
    const flow = scriptedFetch(transcript());
    const live = new SessionModel(new ApiClient("", flow.fetchFn));
    await live.start(meta.create_body);
    for (const [w, l] of PAIRS) await live.prefer(w, l);
    await live.nextBatch();

    const restore = scriptedFetch([
      { method: "GET", path: `/sessions/${SID}`, payload: sessionStateFinal },
      {
        method: "GET",
        path: `/sessions/${SID}/candidates`,
        payload: candidatesAfterBatch,
      },
      { method: "GET", path: `/sessions/${SID}/posterior`, payload: posteriorAfter3 },
    ]);
    const refreshed = new SessionModel(new ApiClient("", restore.fetchFn));
    await refreshed.restore(SID);

    expect(refreshed.sessionId).toBe(live.sessionId);
    expect(refreshed.batches).toEqual(live.batches);
    expect(refreshed.posterior).toEqual(live.posterior);
    expect(refreshed.allCards()).toEqual(live.allCards());
    expect(refreshed.history).toEqual(live.history);
  });

  it("surfaces service errors verbatim", async () => {
    const { fetchFn } = scriptedFetch([
      {
        method: "GET",
        path: "/sessions/nope",
        status: 404,
        payload: errorUnknown,
      },
    ]);
    const model = new SessionModel(new ApiClient("", fetchFn));
    const err = await model.restore("nope").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).code).toBe(errorUnknown.code);
    expect((err as ApiError).message).toBe(errorUnknown.message);
    expect((err as ApiError).status).toBe(404);
  });
});
