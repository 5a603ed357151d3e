import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { makeDocument } from "./fixtures.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("builds versioned paths and parses responses", async () => {
    const calls: { url: string; init?: RequestInit }[] = [];
    const client = new ApiClient("http://example.test:8000/", async (url, init) => {
      calls.push({ url, init });
      return jsonResponse(200, { session_id: "abc", score: makeDocument(8) });
    });
    const created = await client.createSessionFromLength(8, 4);
    expect(created.session_id).toBe("abc");
    expect(calls[0].url).toBe("http://example.test:8000/v1/sessions");
    expect(calls[0].init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ length: 8, seed: 4 });
  });

  it("hits the session endpoints", async () => {
    const urls: string[] = [];
    const client = new ApiClient("http://h", async (url) => {
      urls.push(url);
      return jsonResponse(200, { score: makeDocument(8), undo_depth: 0, seed: 1 });
    });
    await client.getScore("s1");
    await client.generate("s1", { region: { cells: [[1, 0]] }, pins: [] });
    await client.undo("s1");
    expect(urls).toEqual([
      "http://h/v1/sessions/s1/score",
      "http://h/v1/sessions/s1/generate",
      "http://h/v1/sessions/s1/undo",
    ]);
    expect(client.exportUrl("s1", "midi")).toBe("http://h/v1/sessions/s1/export?format=midi");
  });

  it("turns violation bodies into ApiError with the list intact", async () => {
    const client = new ApiClient("http://h", async () =>
      jsonResponse(422, { violations: ["region is empty", "pin out of region"] }),
    );
    try {
      await client.generate("s1", { region: { cells: [] }, pins: [] });
      expect.unreachable();
    } catch (error) {
      const apiError = error as ApiError;
      expect(apiError.status).toBe(422);
      expect(apiError.violations).toEqual(["region is empty", "pin out of region"]);
      expect(apiError.message).toContain("region is empty");
    }
  });

  it("handles detail-only and non-JSON errors", async () => {
    const detailClient = new ApiClient("http://h", async () =>
      jsonResponse(409, { detail: "session is busy" }),
    );
    await expect(detailClient.undo("s1")).rejects.toThrow(/busy/);

    const textClient = new ApiClient("http://h", async () => new Response("boom", { status: 500 }));
    await expect(textClient.getScore("s1")).rejects.toThrow(/500/);
  });
});
