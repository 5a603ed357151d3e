/** Test fixtures: score documents and a mock API that honors the service
 * contract (region-only changes, pins respected, per-seed determinism,
 * undo by replay). */

import type { GenerateResponse, ScoreResponse } from "../src/api.js";
import {
  SCORE_FORMAT,
  SCORE_VERSION,
  type GenerationRequest,
  type ModelInfo,
  type ScoreDocument,
  type Token,
} from "../src/types.js";

export const VOCAB: string[][] = [
  ["__", "START", "END", "C5", "D5", "E5", "F5", "G5"],
  ["__", "START", "END", "E4", "F4", "G4", "A4", "B4"],
  ["__", "START", "END", "G3", "A3", "B3", "C4", "D4"],
  ["__", "START", "END", "C3", "D3", "E3", "F3", "G3"],
];

const MIDI: Record<string, number> = {
  C5: 72, D5: 74, E5: 76, F5: 77, G5: 79,
  E4: 64, F4: 65, G4: 67, A4: 69, B4: 71,
  G3: 55, A3: 57, B3: 59, C4: 60, D4: 62,
  C3: 48, D3: 50, E3: 52, F3: 53,
};

export function token(label: string): Token {
  if (label === "__") {
    return { kind: "hold" };
  }
  return { kind: "pitch", label, midi: MIDI[label] };
}

export function makeDocument(length = 16): ScoreDocument {
  const base = ["C5", "E4", "G3", "C3"];
  const voices: Token[][] = base.map((label) => {
    const tokens: Token[] = [];
    for (let tick = 0; tick < length; tick += 1) {
      tokens.push(tick % 4 === 0 ? token(label) : token("__"));
    }
    return tokens;
  });
  return {
    format: SCORE_FORMAT,
    version: SCORE_VERSION,
    encoding: "spelled",
    length,
    voices,
    fermata: new Array(length).fill(false),
    subdivision: Array.from({ length }, (_, t) => (t % 4) + 1),
    key_signature: new Array(length).fill(0),
  };
}

export const MODEL_INFO: ModelInfo = {
  kind: "maxent",
  encoding: "spelled",
  delta_t: 8,
  vocabularies: VOCAB,
  ranges: [
    [72, 79],
    [64, 71],
    [55, 62],
    [48, 55],
  ],
};

function cloneDocument(doc: ScoreDocument): ScoreDocument {
  return JSON.parse(JSON.stringify(doc)) as ScoreDocument;
}

/** Deterministic stand-in for the sampler: picks from the voice vocabulary
 * (or the pin set) by hashing (seed, voice, tick). */
export class MockService {
  doc: ScoreDocument;
  history: ScoreDocument[] = [];
  requests: GenerationRequest[] = [];
  nextSeed = 1000;

  constructor(doc: ScoreDocument) {
    this.doc = doc;
  }

  generate(request: GenerationRequest): GenerateResponse {
    const seed = request.seed ?? this.nextSeed++;
    const updated = cloneDocument(this.doc);
    const pinned = new Map(
      (request.pins ?? []).map((pin) => [`${pin.voice}:${pin.tick}`, pin.allowed]),
    );
    for (const [voice, tick] of request.region.cells ?? []) {
      const pool = pinned.get(`${voice}:${tick}`) ?? VOCAB[voice - 1].slice(3).concat("__");
      const pick = pool[Math.abs(hash(seed, voice, tick)) % pool.length];
      updated.voices[voice - 1][tick] = token(pick);
    }
    for (const edit of request.metadata?.fermata ?? []) {
      updated.fermata[edit.tick] = edit.value;
    }
    for (const edit of request.metadata?.key_signature ?? []) {
      for (let t = edit.bar * 16; t < Math.min((edit.bar + 1) * 16, updated.length); t += 1) {
        updated.key_signature[t] = edit.value;
      }
    }
    this.history.push(this.doc);
    this.doc = updated;
    this.requests.push(request);
    return { score: cloneDocument(updated), seed };
  }

  undo(): ScoreResponse {
    const previous = this.history.pop();
    if (previous === undefined) {
      throw Object.assign(new Error("nothing to undo"), { status: 400 });
    }
    this.doc = previous;
    this.requests.pop();
    return { score: cloneDocument(previous), undo_depth: this.history.length };
  }
}

function hash(seed: number, voice: number, tick: number): number {
  let h = seed ^ (voice * 2654435761) ^ (tick * 40503);
  h = Math.imul(h ^ (h >>> 16), 2246822507);
  h = Math.imul(h ^ (h >>> 13), 3266489909);
  return h ^ (h >>> 16);
}
