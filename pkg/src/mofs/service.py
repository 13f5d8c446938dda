"""HTTP JSON API over the pipeline: dataset upload, run launch and progress,
report retrieval, interactive re-ranking, discards, and the final choice.

Re-ranking happens server-side so clients never reimplement the scoring; the
UI is a pure consumer of these endpoints.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.responses import JSONResponse

from mofs import interpret
from mofs.data import ColumnNotFound, DatasetError, load_csv, stratified_split
from mofs.nsga3 import GAConfig, SearchError, run_search
from mofs.objectives import DEFAULT_VIF_CAP, DIRECTIONS, OBJECTIVE_NAMES
from mofs.store import InvalidChoice, RunStore, UnknownDataset, UnknownRun

ERROR_CODES = (
    "bad_request",
    "bad_column",
    "bad_dataset",
    "not_found",
    "not_ready",
    "invalid_weights",
    "unknown_solution",
    "discarded_solution",
    "no_final_choice",
    "conflict",
    "internal",
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str = ""):
        assert code in ERROR_CODES
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def _solution_payload(ss) -> list[dict]:
    return [
        {
            "id": i,
            "mask": [int(b) for b in c.mask],
            "objectives": c.objectives.as_dict(),
        }
        for i, c in enumerate(ss.solutions)
    ]


def _matrix_from_record(record: dict) -> np.ndarray:
    return np.array(
        [
            [s["objectives"][name] for name in OBJECTIVE_NAMES]
            for s in record["solutions"]
        ],
        dtype=float,
    )


def execute_run(store: RunStore, run_id: str) -> None:
    """Worker body: load data, search, interpret, persist. Never raises."""
    record = store.get(run_id)
    try:
        store.mark_running(run_id)
        meta = store.dataset_meta(record["dataset"]["dataset_id"])
        options = record.get("options", {})
        ds = load_csv(
            store.dataset_csv_path(meta["dataset_id"]),
            target_column=meta["target"],
            sensitive_column=meta["sensitive"],
            positive_label=meta["positive_label"],
            name=meta.get("name", meta["dataset_id"]),
        )
        split = stratified_split(
            ds,
            test_fraction=options.get("test_fraction", 0.3),
            seed=record["config"]["seed"],
        )
        cfg = GAConfig(**record["config"])
        vif_cap = options.get("vif_cap", DEFAULT_VIF_CAP)

        def progress(done, total):
            store.update_progress(run_id, done)

        ss = run_search(ds, split, cfg, record["classifier"], vif_cap=vif_cap, progress=progress)
        store.save_front(run_id, _solution_payload(ss), ss.evaluation_count, ss.provenance)
        report = interpret.build_report(
            ss,
            ds,
            split,
            record["classifier"],
            primary_scheme=options.get("primary_scheme", "rstd"),
            k=options.get("k", "auto"),
            vif_cap=vif_cap,
            contribution_samples=options.get("contribution_samples", 300),
            seed=record["config"]["seed"],
        )
        store.save_report(run_id, report.to_dict())
    except SearchError as exc:
        partial = _solution_payload(exc.partial) if exc.partial else None
        store.mark_failed(run_id, str(exc), partial_solutions=partial)
    except Exception as exc:  # any failure must land in the record
        store.mark_failed(run_id, str(exc))


def create_app(data_dir, workers: int = 2, ui_dir=None) -> FastAPI:
    store = RunStore(data_dir)
    executor = ThreadPoolExecutor(max_workers=workers)
    app = FastAPI(title="mofs service")
    app.state.store = store
    app.state.executor = executor

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "detail": exc.detail},
        )

    def run_summary(record: dict) -> dict:
        out = {
            "run_id": record["run_id"],
            "status": record["status"],
            "classifier": record["classifier"],
            "config": record["config"],
            "dataset": record["dataset"],
            "progress": record["progress"],
            "final_choice": record["final_choice"],
            "final_choice_history": record["final_choice_history"],
            "discarded_solution_ids": record["discarded_solution_ids"],
            "error": record["error"],
        }
        if record["solutions"] is not None:
            out["solutions_count"] = len(record["solutions"])
        return out

    def load_record(run_id: str) -> dict:
        try:
            return store.get(run_id)
        except UnknownRun:
            raise ApiError(404, "not_found", f"unknown run {run_id}") from None

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/datasets")
    async def upload_dataset(
        file: UploadFile = File(...),
        target: str = Form(...),
        sensitive: str = Form(...),
        positive_label: str = Form(...),
        name: str = Form(""),
    ):
        payload = await file.read()
        dataset_id = store.register_dataset(
            payload,
            {
                "target": target,
                "sensitive": sensitive,
                "positive_label": positive_label,
                "name": name or (file.filename or "upload"),
            },
        )
        try:
            ds = load_csv(
                store.dataset_csv_path(dataset_id),
                target_column=target,
                sensitive_column=sensitive,
                positive_label=positive_label,
                name=name or (file.filename or dataset_id),
            )
        except ColumnNotFound as exc:
            raise ApiError(422, "bad_column", str(exc)) from None
        except DatasetError as exc:
            raise ApiError(422, "bad_dataset", str(exc)) from None
        return {
            "dataset_id": dataset_id,
            "m": ds.n_features,
            "n": ds.n_rows,
            "feature_names": list(ds.feature_names),
            "dropped_rows": ds.dropped_count,
        }

    @app.get("/datasets/{dataset_id}")
    async def dataset_info(dataset_id: str):
        try:
            return store.dataset_meta(dataset_id)
        except UnknownDataset:
            raise ApiError(404, "not_found", f"unknown dataset {dataset_id}") from None

    @app.post("/runs")
    async def launch_run(body: dict):
        dataset_id = body.get("dataset_id")
        classifier = body.get("classifier", "lr")
        overrides = dict(body.get("overrides") or {})
        if classifier not in ("nb", "lr"):
            raise ApiError(422, "bad_request", f"unknown classifier {classifier!r}")
        try:
            meta = store.dataset_meta(dataset_id)
        except UnknownDataset:
            raise ApiError(404, "not_found", f"unknown dataset {dataset_id}") from None
        try:
            ds = load_csv(
                store.dataset_csv_path(dataset_id),
                target_column=meta["target"],
                sensitive_column=meta["sensitive"],
                positive_label=meta["positive_label"],
            )
        except DatasetError as exc:
            raise ApiError(422, "bad_dataset", str(exc)) from None
        seed = int(overrides.pop("seed", 0))
        options = {
            key: overrides.pop(key)
            for key in ("test_fraction", "vif_cap", "primary_scheme", "k", "contribution_samples")
            if key in overrides
        }
        try:
            cfg = GAConfig.for_features(ds.n_features, seed=seed, **overrides)
        except (TypeError, ValueError) as exc:
            raise ApiError(422, "bad_request", f"invalid configuration: {exc}") from None
        run_id = store.create_run(cfg, {"dataset_id": dataset_id, **ds.fingerprint()}, classifier, options)
        executor.submit(execute_run, store, run_id)
        return {"run_id": run_id}

    @app.get("/runs")
    async def list_runs():
        return {"run_ids": store.list_runs()}

    @app.get("/runs/{run_id}")
    async def run_status(run_id: str):
        return run_summary(load_record(run_id))

    @app.get("/runs/{run_id}/report")
    async def run_report(run_id: str):
        load_record(run_id)
        report = store.get_report(run_id)
        if report is None:
            raise ApiError(409, "not_ready", "run has no report yet")
        return report

    @app.post("/runs/{run_id}/rank")
    async def rank(run_id: str, body: dict):
        record = load_record(run_id)
        if record["status"] != "Done":
            raise ApiError(409, "not_ready", f"run status is {record['status']}")
        scheme = body.get("scheme")
        custom = body.get("custom_weights")
        exclude = bool(body.get("exclude_discarded", False))
        if scheme is None and custom is None:
            scheme = "equal"
        if custom is not None:
            scheme = "custom"
        matrix = _matrix_from_record(record)
        ids = list(range(len(matrix)))
        if exclude:
            discarded = set(record["discarded_solution_ids"])
            keep = [i for i in ids if i not in discarded]
            matrix = matrix[keep]
            ids = keep
        try:
            if scheme == "custom":
                weights = interpret.compute_weights(matrix, DIRECTIONS, "custom", custom=np.asarray(custom, dtype=float))
            elif len(matrix) == 1:
                weights = interpret.compute_weights(matrix, DIRECTIONS, "equal")
            else:
                weights = interpret.compute_weights(matrix, DIRECTIONS, scheme)
        except (TypeError, ValueError) as exc:
            raise ApiError(422, "invalid_weights", str(exc)) from None
        ranking = interpret.topsis_rank(matrix, DIRECTIONS, weights)
        return {
            "scheme": scheme,
            "weights": [float(w) for w in weights.weights],
            "results": [
                {"id": int(ids[i]), "ps": float(ranking.ps[i]), "rank": int(ranking.rank[i])}
                for i in ranking.order
            ],
            "excluded": sorted(set(record["discarded_solution_ids"])) if exclude else [],
        }

    @app.post("/runs/{run_id}/discard")
    async def discard(run_id: str, body: dict):
        record = load_record(run_id)
        if record["status"] != "Done":
            raise ApiError(409, "not_ready", f"run status is {record['status']}")
        ids = body.get("solution_ids") or []
        try:
            updated = store.discard_solutions(run_id, [int(i) for i in ids])
        except InvalidChoice as exc:
            raise ApiError(422, "unknown_solution" if "unknown" in str(exc) else "conflict", str(exc)) from None
        return run_summary(updated)

    @app.post("/runs/{run_id}/final")
    async def final_choice(run_id: str, body: dict):
        record = load_record(run_id)
        if record["status"] != "Done":
            raise ApiError(409, "not_ready", f"run status is {record['status']}")
        if "solution_id" not in body:
            raise ApiError(422, "bad_request", "solution_id required")
        try:
            updated = store.set_final_choice(run_id, int(body["solution_id"]), note=str(body.get("note", "")))
        except InvalidChoice as exc:
            code = "discarded_solution" if "discarded" in str(exc) else "unknown_solution"
            raise ApiError(422, code, str(exc)) from None
        return run_summary(updated)

    @app.get("/runs/{run_id}/export")
    async def export(run_id: str):
        record = load_record(run_id)
        if record["status"] != "Done":
            raise ApiError(409, "not_ready", f"run status is {record['status']}")
        if not record["final_choice"]:
            raise ApiError(409, "no_final_choice", "no final choice committed")
        solution_id = record["final_choice"]["solution_id"]
        solution = next(s for s in record["solutions"] if s["id"] == solution_id)
        report = store.get_report(run_id) or {}
        names = report.get("provenance", {}).get("feature_names")
        if names is None:
            names = [f"f{j}" for j in range(len(solution["mask"]))]
        return {
            "run_id": run_id,
            "solution_id": solution_id,
            "feature_names": [names[j] for j, bit in enumerate(solution["mask"]) if bit],
            "mask": solution["mask"],
            "note": record["final_choice"].get("note", ""),
            "provenance": record.get("provenance", {}),
        }

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
