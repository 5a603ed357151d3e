/** Wire types of the choralegen HTTP API (all tick/bar indexes 0-based). */

export interface PitchToken {
  kind: "pitch";
  label: string;
  midi: number;
}

export interface HoldToken {
  kind: "hold";
}

export type Token = PitchToken | HoldToken;

export interface ScoreDocument {
  format: string;
  version: number;
  encoding: "midi" | "spelled";
  length: number;
  voices: Token[][]; // soprano, alto, tenor, bass
  fermata: boolean[];
  subdivision: number[];
  key_signature: number[];
}

export const SCORE_FORMAT = "choralegen-score";
export const SCORE_VERSION = 1;
export const VOICE_NAMES = ["Soprano", "Alto", "Tenor", "Bass"] as const;
export const TICKS_PER_BAR = 16;

export interface RegionSpec {
  cells?: [number, number][]; // (voice 1..4, tick0)
  voices?: number[];
  start?: number;
  end?: number;
}

export interface PinSpec {
  voice: number;
  tick: number;
  allowed: string[];
}

export interface FermataEdit {
  tick: number;
  value: boolean;
}

export interface KeySignatureEdit {
  bar: number;
  value: number;
}

export interface MetadataOverride {
  fermata: FermataEdit[];
  key_signature: KeySignatureEdit[];
}

export interface GenerationRequest {
  region: RegionSpec;
  pins: PinSpec[];
  metadata?: MetadataOverride;
  iterations?: number;
  seed?: number;
}

export interface ModelInfo {
  kind: string;
  encoding: "midi" | "spelled";
  delta_t: number;
  vocabularies: string[][];
  ranges: [number, number][];
}

export function isHold(token: Token): token is HoldToken {
  return token.kind === "hold";
}

export function tokenLabel(token: Token): string {
  return isHold(token) ? "__" : token.label;
}

/** Cell key used by selections and diff sets: "voice:tick0". */
export function cellKey(voice: number, tick: number): string {
  return `${voice}:${tick}`;
}

export function parseCellKey(key: string): [number, number] {
  const [voice, tick] = key.split(":").map(Number);
  return [voice, tick];
}

/** Cells whose tokens differ between two documents of equal length. */
export function diffCells(before: ScoreDocument, after: ScoreDocument): Set<string> {
  const changed = new Set<string>();
  for (let voice = 1; voice <= 4; voice += 1) {
    const old = before.voices[voice - 1];
    const now = after.voices[voice - 1];
    for (let tick = 0; tick < Math.min(old.length, now.length); tick += 1) {
      if (tokenLabel(old[tick]) !== tokenLabel(now[tick])) {
        changed.add(cellKey(voice, tick));
      }
    }
  }
  return changed;
}
