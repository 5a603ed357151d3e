/** Web-Audio playback: note durations are hold run lengths times one
 * sixteenth at the chosen tempo, one timbre per voice, with a moving
 * playhead.  The scheduling math is pure and tested; the audio layer
 * degrades to a visible message when no AudioContext exists.
 */

import { noteRuns } from "./grid.js";
import type { ScoreDocument } from "./types.js";

export interface NoteEvent {
  voice: number;
  midi: number;
  startSeconds: number;
  durationSeconds: number;
}

export function sixteenthSeconds(quarterBpm: number): number {
  return 60 / quarterBpm / 4;
}

export function ticksPerSecond(quarterBpm: number): number {
  return 1 / sixteenthSeconds(quarterBpm);
}

/** Every note of the document as absolute (start, duration) seconds. */
export function schedule(doc: ScoreDocument, quarterBpm: number): NoteEvent[] {
  const tick = sixteenthSeconds(quarterBpm);
  const events: NoteEvent[] = [];
  for (let voice = 1; voice <= 4; voice += 1) {
    for (const run of noteRuns(doc.voices[voice - 1], voice)) {
      events.push({
        voice,
        midi: run.midi,
        startSeconds: run.startTick * tick,
        durationSeconds: run.length * tick,
      });
    }
  }
  return events.sort((a, b) => a.startSeconds - b.startSeconds || a.voice - b.voice);
}

export function playheadTickAt(elapsedSeconds: number, quarterBpm: number): number {
  return Math.floor(elapsedSeconds * ticksPerSecond(quarterBpm));
}

export function midiToFrequency(midi: number): number {
  return 440 * Math.pow(2, (midi - 69) / 12);
}

const VOICE_WAVEFORMS: OscillatorType[] = ["sine", "triangle", "square", "sawtooth"];

interface AudioContextLike {
  currentTime: number;
  destination: AudioNode;
  createOscillator(): OscillatorNode;
  createGain(): GainNode;
  close(): Promise<void>;
}

export class Player {
  unavailableMessage: string | null = null;
  private context: AudioContextLike | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;
  private startedAt = 0;
  private startTick = 0;

  constructor(
    private makeContext: () => AudioContextLike | null = defaultContextFactory,
    private onPlayhead: (tick: number | null) => void = () => undefined,
  ) {}

  get playing(): boolean {
    return this.context !== null;
  }

  /** Start sounding the document at a tick; false when audio is unavailable. */
  play(doc: ScoreDocument, quarterBpm: number, fromTick = 0): boolean {
    this.stop();
    const context = this.makeContext();
    if (context === null) {
      this.unavailableMessage = "Audio is unavailable in this browser; playback disabled.";
      return false;
    }
    this.unavailableMessage = null;
    this.context = context;
    this.startTick = fromTick;
    const offset = fromTick * sixteenthSeconds(quarterBpm);
    const base = context.currentTime + 0.05;

    for (const event of schedule(doc, quarterBpm)) {
      const end = event.startSeconds + event.durationSeconds;
      if (end <= offset) {
        continue;
      }
      const start = Math.max(event.startSeconds - offset, 0);
      const duration = end - offset - start;
      const oscillator = context.createOscillator();
      oscillator.type = VOICE_WAVEFORMS[event.voice - 1];
      oscillator.frequency.value = midiToFrequency(event.midi);
      const gain = context.createGain();
      gain.gain.setValueAtTime(0.12, base + start);
      gain.gain.setTargetAtTime(0, base + start + duration - 0.02, 0.01);
      oscillator.connect(gain);
      gain.connect(context.destination);
      oscillator.start(base + start);
      oscillator.stop(base + start + duration);
    }

    this.startedAt = base;
    const totalTicks = doc.length;
    this.timer = setInterval(() => {
      if (this.context === null) {
        return;
      }
      const elapsed = this.context.currentTime - this.startedAt;
      const tick = this.startTick + playheadTickAt(Math.max(elapsed, 0), quarterBpm);
      if (tick >= totalTicks) {
        this.stop();
      } else {
        this.onPlayhead(tick);
      }
    }, 30);
    return true;
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    if (this.context !== null) {
      void this.context.close();
      this.context = null;
    }
    this.onPlayhead(null);
  }

  seek(doc: ScoreDocument, quarterBpm: number, tick: number): boolean {
    return this.play(doc, quarterBpm, tick);
  }
}

function defaultContextFactory(): AudioContextLike | null {
  const Ctor =
    (globalThis as { AudioContext?: new () => AudioContext }).AudioContext ??
    (globalThis as { webkitAudioContext?: new () => AudioContext }).webkitAudioContext;
  return Ctor ? new Ctor() : null;
}
