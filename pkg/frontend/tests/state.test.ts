import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { StudioController, StudioStore, pinViolations } from "../src/state.js";
import { cellKey, tokenLabel } from "../src/types.js";
import { MockService, makeDocument } from "./fixtures.js";

function makeController(service: MockService) {
  const api = {
    generate: async (_session: string, request: Parameters<MockService["generate"]>[0]) =>
      service.generate(request),
    undo: async () => service.undo(),
  } as unknown as ApiClient;
  const store = new StudioStore();
  const controller = new StudioController(api, store, "session-1");
  controller.adoptScore(JSON.parse(JSON.stringify(service.doc)));
  return { controller, store };
}

describe("StudioController", () => {
  let service: MockService;

  beforeEach(() => {
    service = new MockService(makeDocument(32));
  });

  it("changes only selected unpinned cells on regenerate", async () => {
    const { controller, store } = makeController(service);
    controller.selection.selectBar(1, 16);
    const before = store.state.score!;
    await controller.submitRegion(5);
    const after = store.state.score!;
    for (let voice = 1; voice <= 4; voice += 1) {
      for (let tick = 0; tick < 32; tick += 1) {
        const inside = tick >= 16;
        if (!inside) {
          expect(tokenLabel(after.voices[voice - 1][tick])).toBe(
            tokenLabel(before.voices[voice - 1][tick]),
          );
        }
      }
    }
    for (const key of store.state.changedCells) {
      expect(controller.selection.cells.has(key)).toBe(true);
    }
  });

  it("preserves pinned cells exactly through the loop", async () => {
    const { controller, store } = makeController(service);
    controller.selection.selectBar(0, 16);
    controller.selection.pin(1, 0, ["G5"]);
    controller.selection.pin(2, 4, ["__"]);
    await controller.submitRegion(9);
    const score = store.state.score!;
    expect(tokenLabel(score.voices[0][0])).toBe("G5");
    expect(tokenLabel(score.voices[1][4])).toBe("__");
    expect(pinViolations(service.requests[0], score)).toEqual([]);
  });

  it("regenerate-same-seed reproduces the identical document", async () => {
    const { controller, store } = makeController(service);
    controller.selection.selectRectangle([2, 3, 4], 0, 16);
    await controller.submitRegion();
    const first = JSON.stringify(store.state.score);
    const seed = store.state.lastSeed;
    await controller.undo();
    await controller.regenerateSame();
    expect(store.state.lastSeed).toBe(seed);
    expect(JSON.stringify(store.state.score)).toBe(first);
  });

  it("matches the service's undo depth and content", async () => {
    const { controller, store } = makeController(service);
    const initial = JSON.stringify(store.state.score);
    controller.selection.selectBar(0, 16);
    await controller.submitRegion(1);
    expect(store.state.undoDepth).toBe(1);
    await controller.submitRegion(2);
    expect(store.state.undoDepth).toBe(2);
    await controller.undo();
    expect(store.state.undoDepth).toBe(service.history.length);
    await controller.undo();
    expect(store.state.undoDepth).toBe(0);
    expect(JSON.stringify(store.state.score)).toBe(initial);
  });

  it("leaves state untouched and surfaces violations on failure", async () => {
    const failing = {
      generate: async () => {
        throw new ApiError(422, "region is empty", ["region is empty"]);
      },
    } as unknown as ApiClient;
    const store = new StudioStore();
    const controller = new StudioController(failing, store, "session-1");
    controller.adoptScore(makeDocument(16));
    const before = JSON.stringify(store.state.score);
    controller.selection.toggleCell(1, 0);
    await expect(controller.submitRegion()).rejects.toThrow();
    expect(store.state.errors).toEqual(["region is empty"]);
    expect(JSON.stringify(store.state.score)).toBe(before);
    expect(store.state.busy).toBe(false);
    expect(store.state.undoDepth).toBe(0);
  });

  it("rejects a second in-flight request", async () => {
    let release: (() => void) | null = null;
    const blocking = {
      generate: (_s: string, request: Parameters<MockService["generate"]>[0]) =>
        new Promise((resolve) => {
          release = () => resolve(service.generate(request));
        }),
    } as unknown as ApiClient;
    const store = new StudioStore();
    const controller = new StudioController(blocking, store, "session-1");
    controller.adoptScore(JSON.parse(JSON.stringify(service.doc)));
    controller.selection.toggleCell(1, 0);
    const pending = controller.submitRegion(3);
    expect(store.state.busy).toBe(true);
    await expect(controller.submitRegion(4)).rejects.toThrow(/in flight/);
    release!();
    await pending;
    expect(store.state.busy).toBe(false);
  });

  it("flags responses that break a pin", async () => {
    const lying = {
      generate: async () => ({ score: makeDocument(16), seed: 1 }),
    } as unknown as ApiClient;
    const store = new StudioStore();
    const controller = new StudioController(lying, store, "session-1");
    controller.adoptScore(makeDocument(16));
    controller.selection.toggleCell(1, 0);
    controller.selection.pin(1, 0, ["G5"]);  // mock returns C5 there
    await expect(controller.submitRegion(1)).rejects.toThrow(/pinned/);
    expect(store.state.errors[0]).toContain(cellKey(1, 0));
  });
});
