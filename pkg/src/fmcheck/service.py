"""JSON-over-HTTP facade for interactive configuration.

Sessions are in-memory with idle expiry and no persistence. Each decide call
reruns propagation from scratch over the user decisions, so the derived state
is always a pure function of (model, user decisions) — undo is replay.
A decision that targets a feature the current propagation already forced the
other way is rejected with 409 and the would-be conflict report; any other
conflict is kept in the state, flagged, for the client to undo.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .analysis import (
    DEFAULT_COUNT_CAP,
    ModelTooLargeError,
    analyze,
    check_full_configuration,
    count_cap_from_env,
)
from .cli import conflict_json
from .cnf import CnfClauseSet, to_cnf
from .dsl import ParseError, try_parse_model
from .logic import EncodedModel, encode_model
from .model import AnalysisReport, Configuration, Decision, Feature, FeatureModel
from .propagate import PropagationResult, propagate, reason_text
from .solve import sat

DEFAULT_SESSION_TTL = 3600.0


@dataclass(frozen=True)
class LoadedModel:
    model: FeatureModel
    encoded: EncodedModel
    cnf: CnfClauseSet


def load_model_dir(path: str | Path) -> tuple[dict[str, LoadedModel],
                                              list[tuple[str, list[ParseError]]]]:
    """Parse every `.fm` file in a directory; unparseable files are skipped
    and reported, not fatal."""
    models: dict[str, LoadedModel] = {}
    failures: list[tuple[str, list[ParseError]]] = []
    for file in sorted(Path(path).glob("*.fm")):
        model, errors = try_parse_model(file.read_text(encoding="utf-8"),
                                        name_hint=file.stem)
        if model is None:
            failures.append((file.name, errors))
            continue
        if model.name in models:
            continue  # first file wins; later duplicates are ignored
        encoded = encode_model(model)
        models[model.name] = LoadedModel(model, encoded, to_cnf(encoded))
    return models, failures


@dataclass
class _Session:
    session_id: str
    model_name: str
    user: Configuration
    result: PropagationResult
    log: list[tuple[str, str]] = field(default_factory=list)
    last_access: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)


class CreateSessionBody(BaseModel):
    model: str


class DecideBody(BaseModel):
    feature: str
    decision: Literal["select", "deselect", "undecide"]


def _feature_states(loaded: LoadedModel, result: PropagationResult) -> dict:
    states = {}
    user = result.user
    forced = {d.feature: d for d in result.derivations}
    for fid in loaded.model.feature_ids:
        decision = user.of(fid)
        if decision is Decision.SELECTED:
            states[fid] = {"state": "user-selected", "reason": None}
        elif decision is Decision.DESELECTED:
            states[fid] = {"state": "user-deselected", "reason": None}
        elif fid in forced:
            d = forced[fid]
            states[fid] = {
                "state": "forced-selected" if d.value else "forced-deselected",
                "reason": reason_text(d.via),
            }
        else:
            states[fid] = {"state": "undecided", "reason": None}
    return states


def _session_state(loaded: LoadedModel, session: _Session) -> dict:
    result = session.result
    if result.conflict is not None:
        extensible = False
        complete_valid = False
    else:
        merged = result.configuration
        assumptions = [(fid, d is Decision.SELECTED)
                       for fid, d in merged.decisions.items()]
        extensible = sat(loaded.encoded, assumptions, cnf=loaded.cnf).satisfiable
        if merged.is_full(loaded.model.feature_ids):
            complete_valid = check_full_configuration(loaded.encoded, merged).valid
        else:
            complete_valid = None
    return {
        "session_id": session.session_id,
        "model": session.model_name,
        "features": _feature_states(loaded, result),
        "extensible": extensible,
        "complete_valid": complete_valid,
        "conflict": conflict_json(result.conflict) if result.conflict else None,
    }


def _analysis_json(name: str, report: AnalysisReport, order: dict[str, int]) -> dict:
    return {
        "model": name,
        "void": report.void,
        "dead": sorted(report.dead_features, key=order.__getitem__),
        "core": sorted(report.core_features, key=order.__getitem__),
        "product_count": report.product_count,
    }


def _tree_json(feature: Feature) -> dict:
    return {
        "id": feature.id,
        "display_name": feature.display_name,
        "groups": [
            {"kind": group.kind.keyword,
             "children": [_tree_json(child) for child in group.children]}
            for group in feature.groups
        ],
    }


def create_app(models: dict[str, LoadedModel] | None = None,
               model_dir: str | Path | None = None,
               cors_origin: str = "*",
               session_ttl: float = DEFAULT_SESSION_TTL,
               count_cap: int | None = None,
               clock: Callable[[], float] = time.monotonic) -> FastAPI:
    if models is None:
        if model_dir is None:
            raise ValueError("need either models or model_dir")
        models, _ = load_model_dir(model_dir)
    cap = count_cap if count_cap is not None else count_cap_from_env(DEFAULT_COUNT_CAP)

    app = FastAPI(title="fmcheck", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, _Session] = {}
    sessions_lock = threading.Lock()
    analysis_cache: dict[tuple[str, bool], dict] = {}
    analysis_lock = threading.Lock()

    def get_model(name: str) -> LoadedModel:
        loaded = models.get(name)
        if loaded is None:
            raise HTTPException(404, f"unknown model '{name}'")
        return loaded

    def get_session(session_id: str) -> _Session:
        with sessions_lock:
            now = clock()
            expired = [sid for sid, s in sessions.items()
                       if now - s.last_access > session_ttl]
            for sid in expired:
                del sessions[sid]
            session = sessions.get(session_id)
            if session is None:
                raise HTTPException(404, f"unknown session '{session_id}'")
            session.last_access = now
            return session

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.get("/api/models")
    def list_models() -> list[dict]:
        return [
            {"name": name,
             "feature_count": len(loaded.model.feature_ids),
             "constraint_count": len(loaded.model.constraints)}
            for name, loaded in sorted(models.items())
        ]

    @app.get("/api/models/{name}/tree")
    def model_tree(name: str) -> dict:
        loaded = get_model(name)
        return {
            "name": loaded.model.name,
            "root": _tree_json(loaded.model.root),
            "constraints": [
                {"kind": c.kind.value, "source": c.source, "target": c.target}
                for c in loaded.model.constraints
            ],
        }

    @app.get("/api/models/{name}/analysis")
    def model_analysis(name: str, count: bool = False) -> dict:
        loaded = get_model(name)
        if count and len(loaded.model.feature_ids) > cap:
            raise HTTPException(
                422, f"model has {len(loaded.model.feature_ids)} features, "
                     f"counting is capped at {cap}")
        key = (name, count)
        with analysis_lock:
            cached = analysis_cache.get(key)
        if cached is not None:
            return cached
        report = analyze(loaded.encoded, with_count=count, cap=cap)
        order = {fid: i for i, fid in enumerate(loaded.model.feature_ids)}
        payload = _analysis_json(name, report, order)
        with analysis_lock:
            analysis_cache[key] = payload
        return payload

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        loaded = get_model(body.model)
        user = Configuration()
        session = _Session(
            session_id=uuid.uuid4().hex,
            model_name=body.model,
            user=user,
            result=propagate(loaded.encoded, user, loaded.cnf),
            last_access=clock(),
        )
        with sessions_lock:
            sessions[session.session_id] = session
        return {"session_id": session.session_id,
                "state": _session_state(loaded, session)}

    @app.get("/api/sessions/{session_id}")
    def read_session(session_id: str) -> dict:
        session = get_session(session_id)
        loaded = get_model(session.model_name)
        with session.lock:
            return _session_state(loaded, session)

    @app.post("/api/sessions/{session_id}/decide")
    def decide(session_id: str, body: DecideBody):
        session = get_session(session_id)
        loaded = get_model(session.model_name)
        if body.feature not in loaded.model.by_id:
            raise HTTPException(404, f"unknown feature '{body.feature}'")
        with session.lock:
            decision = {"select": Decision.SELECTED,
                        "deselect": Decision.DESELECTED,
                        "undecide": Decision.UNDECIDED}[body.decision]
            trial_user = session.user.with_decision(body.feature, decision)
            trial = propagate(loaded.encoded, trial_user, loaded.cnf)

            if decision is not Decision.UNDECIDED:
                previously_forced = session.result.forced.get(body.feature)
                wanted = decision is Decision.SELECTED
                if (trial.conflict is not None and previously_forced is not None
                        and previously_forced != wanted):
                    # The feature is already forced the other way: refuse the
                    # decision and hand back the conflict that would arise.
                    return JSONResponse(status_code=409, content={
                        "error": "conflict",
                        "conflict": conflict_json(trial.conflict),
                        "state": _session_state(loaded, session),
                    })

            session.user = trial_user
            session.result = trial
            session.log.append((body.feature, body.decision))
            return _session_state(loaded, session)

    return app
