/** Grid selection: the cells to resample, per-cell pins, and metadata edits.
 *
 * Converts losslessly to a GenerationRequest, which is the only thing the
 * backend ever sees; pins are constrained to selected cells up front so an
 * invalid request cannot even be built.
 */

import {
  cellKey,
  parseCellKey,
  type GenerationRequest,
  type MetadataOverride,
} from "./types.js";

export class GridSelection {
  cells = new Set<string>();
  pins = new Map<string, string[]>();
  fermataEdits = new Map<number, boolean>();
  keyEdits = new Map<number, number>();

  get isEmpty(): boolean {
    return this.cells.size === 0;
  }

  has(voice: number, tick: number): boolean {
    return this.cells.has(cellKey(voice, tick));
  }

  toggleCell(voice: number, tick: number): void {
    const key = cellKey(voice, tick);
    if (this.cells.has(key)) {
      this.cells.delete(key);
      this.pins.delete(key);
    } else {
      this.cells.add(key);
    }
  }

  /** Add every cell of the voices over [start, end). */
  selectRectangle(voices: number[], start: number, end: number): void {
    for (const voice of voices) {
      for (let tick = start; tick < end; tick += 1) {
        this.cells.add(cellKey(voice, tick));
      }
    }
  }

  selectBar(bar: number, ticksPerBar: number): void {
    this.selectRectangle([1, 2, 3, 4], bar * ticksPerBar, (bar + 1) * ticksPerBar);
  }

  pin(voice: number, tick: number, allowed: string[]): void {
    const key = cellKey(voice, tick);
    if (!this.cells.has(key)) {
      throw new Error(`cannot pin unselected cell (${voice}, ${tick})`);
    }
    if (allowed.length === 0) {
      throw new Error("a pin needs at least one allowed token");
    }
    this.pins.set(key, [...allowed]);
  }

  unpin(voice: number, tick: number): void {
    this.pins.delete(cellKey(voice, tick));
  }

  setFermata(tick: number, value: boolean): void {
    this.fermataEdits.set(tick, value);
  }

  setKeySignature(bar: number, value: number): void {
    if (value < -7 || value > 7) {
      throw new Error(`key signature ${value} outside [-7, 7]`);
    }
    this.keyEdits.set(bar, value);
  }

  clear(): void {
    this.cells.clear();
    this.pins.clear();
    this.fermataEdits.clear();
    this.keyEdits.clear();
  }

  toGenerationRequest(iterations?: number, seed?: number): GenerationRequest {
    if (this.isEmpty) {
      throw new Error("selection is empty");
    }
    const cells = [...this.cells]
      .map(parseCellKey)
      .sort((a, b) => a[0] - b[0] || a[1] - b[1]) as [number, number][];
    const pins = [...this.pins.entries()]
      .map(([key, allowed]) => {
        const [voice, tick] = parseCellKey(key);
        return { voice, tick, allowed: [...allowed] };
      })
      .sort((a, b) => a.voice - b.voice || a.tick - b.tick);
    const request: GenerationRequest = { region: { cells }, pins };
    const metadata = this.metadataOverride();
    if (metadata) {
      request.metadata = metadata;
    }
    if (iterations !== undefined) {
      request.iterations = iterations;
    }
    if (seed !== undefined) {
      request.seed = seed;
    }
    return request;
  }

  private metadataOverride(): MetadataOverride | undefined {
    if (this.fermataEdits.size === 0 && this.keyEdits.size === 0) {
      return undefined;
    }
    return {
      fermata: [...this.fermataEdits.entries()]
        .sort((a, b) => a[0] - b[0])
        .map(([tick, value]) => ({ tick, value })),
      key_signature: [...this.keyEdits.entries()]
        .sort((a, b) => a[0] - b[0])
        .map(([bar, value]) => ({ bar, value })),
    };
  }

  static fromGenerationRequest(request: GenerationRequest): GridSelection {
    const selection = new GridSelection();
    for (const [voice, tick] of request.region.cells ?? []) {
      selection.cells.add(cellKey(voice, tick));
    }
    if (request.region.voices && request.region.start !== undefined && request.region.end !== undefined) {
      selection.selectRectangle(request.region.voices, request.region.start, request.region.end);
    }
    for (const pin of request.pins ?? []) {
      selection.pins.set(cellKey(pin.voice, pin.tick), [...pin.allowed]);
    }
    for (const edit of request.metadata?.fermata ?? []) {
      selection.fermataEdits.set(edit.tick, edit.value);
    }
    for (const edit of request.metadata?.key_signature ?? []) {
      selection.keyEdits.set(edit.bar, edit.value);
    }
    return selection;
  }

  equals(other: GridSelection): boolean {
    const sameSet = (a: Set<string>, b: Set<string>) =>
      a.size === b.size && [...a].every((key) => b.has(key));
    const samePins =
      this.pins.size === other.pins.size &&
      [...this.pins.entries()].every(([key, allowed]) => {
        const theirs = other.pins.get(key);
        return (
          theirs !== undefined &&
          theirs.length === allowed.length &&
          allowed.every((label, position) => theirs[position] === label)
        );
      });
    const sameMap = <K, V>(a: Map<K, V>, b: Map<K, V>) =>
      a.size === b.size && [...a.entries()].every(([key, value]) => b.get(key) === value);
    return (
      sameSet(this.cells, other.cells) &&
      samePins &&
      sameMap(this.fermataEdits, other.fermataEdits) &&
      sameMap(this.keyEdits, other.keyEdits)
    );
  }
}
