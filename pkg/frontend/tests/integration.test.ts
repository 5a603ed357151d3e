/** Full studio loop against a live backend.
 *
 * Skipped unless STUDIO_BACKEND_URL points at a running service, e.g.
 *
 *     choralegen serve --model maxent.model --port 8765 &
 *     STUDIO_BACKEND_URL=http://127.0.0.1:8765 npm test
 */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { StudioController, StudioStore } from "../src/state.js";
import { TICKS_PER_BAR, tokenLabel } from "../src/types.js";

const backend = process.env.STUDIO_BACKEND_URL;

describe.skipIf(!backend)("studio loop against a live service", () => {
  it("select bar, regenerate, pin, undo, regenerate same seed", async () => {
    const api = new ApiClient(backend!);
    const info = await api.modelInfo();
    const created = await api.createSessionFromLength(32, 123);

    const store = new StudioStore();
    const controller = new StudioController(api, store, created.session_id, 800);
    controller.adoptScore(created.score);

    // Select bar 1 and pin one soprano cell to a vocabulary token.
    controller.selection.selectBar(1, TICKS_PER_BAR);
    const pinLabel = info.vocabularies[0][3];
    controller.selection.pin(1, 16, [pinLabel]);

    const before = store.state.score!;
    await controller.submitRegion();
    const after = store.state.score!;

    // Only selected unpinned cells change; the pinned cell is preserved.
    for (let voice = 1; voice <= 4; voice += 1) {
      for (let tick = 0; tick < 16; tick += 1) {
        expect(tokenLabel(after.voices[voice - 1][tick])).toBe(
          tokenLabel(before.voices[voice - 1][tick]),
        );
      }
    }
    expect(tokenLabel(after.voices[0][16])).toBe(pinLabel);

    // Regenerate with the same seed after undo: identical document.
    const first = JSON.stringify(after);
    await controller.undo();
    expect(JSON.stringify(store.state.score)).toBe(JSON.stringify(before));
    await controller.regenerateSame();
    expect(JSON.stringify(store.state.score)).toBe(first);
  }, 120_000);
});
