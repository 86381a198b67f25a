import { describe, expect, it, vi } from "vitest";

import { ApiClient, ServiceError } from "../src/api.js";
import { DEFAULT_SCENARIO, toSimulateBody } from "../src/scenario.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("api client", () => {
  it("posts the scenario body to /simulate and returns the parsed response", async () => {
    const payload = { c_local: "1.24e+24", eta: 0.7653 };
    const fetchFn = vi.fn(async () => jsonResponse(200, payload));
    const client = new ApiClient("http://svc:1", fetchFn as unknown as typeof fetch);

    const body = toSimulateBody(DEFAULT_SCENARIO);
    const out = await client.simulate(body);

    expect(fetchFn).toHaveBeenCalledOnce();
    const [url, init] = fetchFn.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("http://svc:1/simulate");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body as string)).toEqual(body);
    expect(out.c_local).toBe("1.24e+24"); // numbers pass through untouched
  });

  it("wraps 422 infeasibility with the binding constraint", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse(422, { error: "infeasible configuration [memory]: too big", constraint: "memory" }),
    );
    const client = new ApiClient("http://svc:1", fetchFn as unknown as typeof fetch);
    const err = await client.simulate(toSimulateBody(DEFAULT_SCENARIO)).catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.status).toBe(422);
    expect(err.detail.constraint).toBe("memory");
  });

  it("wraps 400 validation errors with field paths", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse(400, {
        error: "invalid request body",
        fields: [{ loc: "body.n_nodes", msg: "should be an integer" }],
      }),
    );
    const client = new ApiClient("http://svc:1", fetchFn as unknown as typeof fetch);
    const err = await client.simulate(toSimulateBody(DEFAULT_SCENARIO)).catch((e) => e);
    expect(err.status).toBe(400);
    expect(err.detail.fields?.[0]?.loc).toBe("body.n_nodes");
  });

  it("propagates network failures for the unreachable banner", async () => {
    const fetchFn = vi.fn(async () => {
      throw new TypeError("fetch failed");
    });
    const client = new ApiClient("http://svc:1", fetchFn as unknown as typeof fetch);
    await expect(client.defaults()).rejects.toThrow("fetch failed");
  });

  it("passes the abort signal through for last-write-wins", async () => {
    const fetchFn = vi.fn(async () => jsonResponse(200, {}));
    const client = new ApiClient("http://svc:1", fetchFn as unknown as typeof fetch);
    const controller = new AbortController();
    await client.simulate(toSimulateBody(DEFAULT_SCENARIO), controller.signal);
    const [, init] = fetchFn.mock.calls[0] as unknown as [string, RequestInit];
    expect(init.signal).toBe(controller.signal);
  });
});
