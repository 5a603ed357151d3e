"""Session-based HTTP service for interactive region regeneration.

Each session holds a score and an edit log of applied generation requests
(with their seeds), so the current state replays deterministically from the
initial score.  Requests against one session are serialized: a second writer
gets 409 instead of waiting.  All tick and bar indexes on the wire are
0-based; the conversion to the 1-based in-memory model happens here.
"""

from __future__ import annotations

import base64
import secrets
import threading
import uuid
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from ..document import DocumentError, chorale_from_document, document_from_chorale
from ..ingest.midi import export_midi
from ..ingest.musicxml import ScoreInputError, export_musicxml, parse_musicxml
from ..models.serialize import EncodingModeMismatch, require_mode
from ..models.training import ConditionalModelSet
from ..sampler import ConstraintSet, SamplerConfig, init_chorale, run
from ..score import (
    TICKS_PER_BAR,
    Chorale,
    MetadataSeq,
    NoteToken,
    parse_token_label,
    strip_spelling,
    validate,
)

API_PREFIX = "/v1"
MAX_SCORE_TICKS = 4096


class RegionSpec(BaseModel):
    """Cells to resample: explicit cell list, or a voices x [start, end) rectangle."""

    cells: list[tuple[int, int]] | None = None  # (voice 1..4, tick0)
    voices: list[int] | None = None
    start: int | None = None
    end: int | None = None


class PinSpec(BaseModel):
    voice: int
    tick: int  # 0-based
    allowed: list[str] = Field(min_length=1)


class FermataEdit(BaseModel):
    tick: int  # 0-based
    value: bool


class KeySignatureEdit(BaseModel):
    bar: int  # 0-based, 16 ticks per bar
    value: int


class MetadataOverride(BaseModel):
    fermata: list[FermataEdit] = Field(default_factory=list)
    key_signature: list[KeySignatureEdit] = Field(default_factory=list)


class GenerationRequest(BaseModel):
    region: RegionSpec
    pins: list[PinSpec] = Field(default_factory=list)
    metadata: MetadataOverride | None = None
    iterations: int | None = None
    seed: int | None = None


class CreateSessionRequest(BaseModel):
    length: int | None = None
    musicxml_base64: str | None = None
    seed: int | None = None


class RequestViolations(Exception):
    def __init__(self, violations: list[str]) -> None:
        super().__init__("; ".join(violations))
        self.violations = violations


class Session:
    def __init__(self, session_id: str, initial: Chorale) -> None:
        self.id = session_id
        self.initial = initial
        self.current = initial
        self.log: list[GenerationRequest] = []
        self.lock = threading.Lock()


def resolve_region(region: RegionSpec, length: int) -> set[tuple[int, int]]:
    """Wire region to a set of 1-based (voice, tick) cells."""
    problems: list[str] = []
    cells: set[tuple[int, int]] = set()
    if region.cells is not None:
        for voice, tick0 in region.cells:
            if not 1 <= voice <= 4 or not 0 <= tick0 < length:
                problems.append(f"cell ({voice}, {tick0}) out of bounds")
            else:
                cells.add((voice, tick0 + 1))
    elif region.voices is not None and region.start is not None and region.end is not None:
        if not all(1 <= v <= 4 for v in region.voices):
            problems.append(f"voices must lie in 1..4, got {region.voices}")
        elif not 0 <= region.start < region.end <= length:
            problems.append(
                f"tick range [{region.start}, {region.end}) out of bounds for length {length}"
            )
        else:
            cells = {(v, t + 1) for v in region.voices for t in range(region.start, region.end)}
    else:
        problems.append("region needs either cells or voices+start+end")
    if not problems and not cells:
        problems.append("region is empty")
    if problems:
        raise RequestViolations(problems)
    return cells


def build_constraints(
    request: GenerationRequest,
    chorale: Chorale,
    model_set: ConditionalModelSet,
) -> tuple[ConstraintSet, set[tuple[int, int]]]:
    length = chorale.length
    region = resolve_region(request.region, length)
    problems: list[str] = []
    allowed: dict[tuple[int, int], list[NoteToken]] = {}
    for pin in request.pins:
        cell = (pin.voice, pin.tick + 1)
        if cell not in region:
            problems.append(f"pin at ({pin.voice}, {pin.tick}) lies outside the region")
            continue
        vocab = model_set.vocabularies[pin.voice - 1]
        tokens = []
        for label in pin.allowed:
            try:
                token = parse_token_label(label, model_set.encoding_mode)
            except ValueError:
                problems.append(f"pin label {label!r} is not a {model_set.encoding_mode}-mode token")
                continue
            if not vocab.contains(token):
                problems.append(f"pin label {label!r} is outside voice {pin.voice}'s vocabulary")
                continue
            tokens.append(token)
        if tokens:
            allowed[cell] = tokens
    if problems:
        raise RequestViolations(problems)
    frozen = {
        (voice, tick)
        for voice in range(1, 5)
        for tick in range(1, length + 1)
        if (voice, tick) not in region
    }
    return ConstraintSet(allowed=allowed, frozen=frozen), region


def apply_metadata_override(metadata: MetadataSeq, override: MetadataOverride | None) -> MetadataSeq:
    if override is None:
        return metadata
    problems: list[str] = []
    length = len(metadata)
    fermata = list(metadata.fermata)
    for edit in override.fermata:
        if not 0 <= edit.tick < length:
            problems.append(f"fermata tick {edit.tick} out of bounds")
        else:
            fermata[edit.tick] = edit.value
    keys = list(metadata.key_signature)
    for edit in override.key_signature:
        start = edit.bar * TICKS_PER_BAR
        if not 0 <= start < length:
            problems.append(f"key signature bar {edit.bar} out of bounds")
        elif not -7 <= edit.value <= 7:
            problems.append(f"key signature {edit.value} outside [-7, 7]")
        else:
            for tick0 in range(start, min(start + TICKS_PER_BAR, length)):
                keys[tick0] = edit.value
    if problems:
        raise RequestViolations(problems)
    return MetadataSeq(tuple(fermata), metadata.subdivision, tuple(keys))


def apply_generation(
    chorale: Chorale,
    request: GenerationRequest,
    model_set: ConditionalModelSet,
    iteration_cap: int,
) -> Chorale:
    """Pure application of one logged request; replay calls this too."""
    constraints, region = build_constraints(request, chorale, model_set)
    metadata = apply_metadata_override(chorale.metadata, request.metadata)
    iterations = request.iterations
    if iterations is None:
        iterations = min(100 * len(region), iteration_cap)
    if iterations > iteration_cap:
        raise RequestViolations(
            [f"iterations {iterations} exceed the server cap of {iteration_cap}"]
        )
    if request.seed is None:
        raise RequestViolations(["internal: request seed must be resolved before applying"])
    config = SamplerConfig(max_iterations=iterations, seed=request.seed)
    return run(
        model_set,
        metadata,
        constraints,
        config,
        seed_chorale=chorale.with_metadata(metadata),
    )


def create_app(model_set: ConditionalModelSet, iteration_cap: int = 200_000) -> FastAPI:
    app = FastAPI(title="choralegen", version="1")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, Session] = {}
    app.state.sessions = sessions

    def get_session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return session

    def initial_chorale(request: CreateSessionRequest) -> Chorale:
        if (request.length is None) == (request.musicxml_base64 is None):
            raise RequestViolations(["give exactly one of length or musicxml_base64"])
        if request.musicxml_base64 is not None:
            try:
                parsed = parse_musicxml(base64.b64decode(request.musicxml_base64))
            except ScoreInputError as exc:
                raise RequestViolations([f"{type(exc).__name__}: {exc}"]) from exc
            except ValueError as exc:
                raise RequestViolations([f"bad base64 payload: {exc}"]) from exc
            if model_set.encoding_mode == "midi":
                parsed = strip_spelling(parsed)
            try:
                require_mode(model_set, parsed.encoding_mode)
            except EncodingModeMismatch as exc:
                raise RequestViolations([str(exc)]) from exc
            stray = validate(parsed, model_set.vocabularies)
            if stray:
                raise RequestViolations(
                    [f"voice {v}, tick {t}: {rule}" for v, t, rule in stray]
                )
            return parsed
        if not 1 <= request.length <= MAX_SCORE_TICKS:
            raise RequestViolations([f"length must lie in [1, {MAX_SCORE_TICKS}]"])
        seed = request.seed if request.seed is not None else secrets.randbits(48)
        return init_chorale(
            request.length,
            MetadataSeq.default(request.length),
            ConstraintSet.none(),
            "marginal",
            np.random.default_rng(seed),
            model_set.vocabularies,
            marginals=model_set.marginals,
        )

    @app.exception_handler(RequestViolations)
    async def handle_violations(_, exc: RequestViolations):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=422, content={"violations": exc.violations})

    @app.post(f"{API_PREFIX}/sessions")
    def create_session(request: CreateSessionRequest) -> dict[str, Any]:
        chorale = initial_chorale(request)
        session = Session(uuid.uuid4().hex, chorale)
        sessions[session.id] = session
        return {"session_id": session.id, "score": document_from_chorale(session.current)}

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/score")
    def get_score(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        return {"score": document_from_chorale(session.current), "undo_depth": len(session.log)}

    @app.post(f"{API_PREFIX}/sessions/{{session_id}}/generate")
    def generate(session_id: str, request: GenerationRequest) -> dict[str, Any]:
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session is busy with another request")
        try:
            resolved = request.model_copy(deep=True)
            if resolved.seed is None:
                # 48 bits keeps assigned seeds inside the JSON-safe integer
                # range, so browser clients can echo them back exactly.
                resolved.seed = secrets.randbits(48)
            updated = apply_generation(session.current, resolved, model_set, iteration_cap)
            session.current = updated
            session.log.append(resolved)
            return {"score": document_from_chorale(updated), "seed": resolved.seed}
        finally:
            session.lock.release()

    @app.post(f"{API_PREFIX}/sessions/{{session_id}}/undo")
    def undo(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session is busy with another request")
        try:
            if not session.log:
                raise HTTPException(status_code=400, detail="nothing to undo")
            session.log.pop()
            current = session.initial
            for logged in session.log:
                current = apply_generation(current, logged, model_set, iteration_cap)
            session.current = current
            return {"score": document_from_chorale(current), "undo_depth": len(session.log)}
        finally:
            session.lock.release()

    @app.get(f"{API_PREFIX}/sessions/{{session_id}}/export")
    def export(session_id: str, format: str = "musicxml") -> Response:
        session = get_session(session_id)
        if format == "musicxml":
            return Response(
                content=export_musicxml(session.current),
                media_type="application/vnd.recordare.musicxml+xml",
            )
        if format == "midi":
            return Response(content=export_midi(session.current), media_type="audio/midi")
        raise HTTPException(status_code=422, detail=f"unknown export format {format!r}")

    @app.get(f"{API_PREFIX}/model")
    def model_info() -> dict[str, Any]:
        return {
            "kind": model_set.kind,
            "encoding": model_set.encoding_mode,
            "delta_t": model_set.delta_t,
            "vocabularies": [v.labels() for v in model_set.vocabularies],
            "ranges": [list(v.midi_range) for v in model_set.vocabularies],
        }

    @app.post(f"{API_PREFIX}/sessions/{{session_id}}/score")
    def replace_score(session_id: str, body: dict[str, Any]) -> dict[str, Any]:
        """Replace a session's score with a document (resets the edit log)."""
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="session is busy with another request")
        try:
            try:
                chorale = chorale_from_document(body.get("score"))
            except DocumentError as exc:
                raise RequestViolations(
                    [str(exc)] + [f"voice {v}, tick {t}: {rule}" for v, t, rule in exc.violations]
                ) from exc
            if model_set.encoding_mode != chorale.encoding_mode:
                raise RequestViolations(["document encoding does not match the model"])
            session.initial = chorale
            session.current = chorale
            session.log = []
            return {"score": document_from_chorale(chorale), "undo_depth": 0}
        finally:
            session.lock.release()

    return app
