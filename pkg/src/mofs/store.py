"""File-backed persistence for datasets, runs, reports, and the final choice.

One JSON document per run under <root>/runs/<run_id>/, written with a
temp-file-then-rename discipline so a record is never observable half-written.
A per-run lock serializes writers; readers take no lock (they always see a
complete document).
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from pathlib import Path

RUN_STATUSES = ("Pending", "Running", "Done", "Failed")


class StoreError(Exception):
    pass


class UnknownRun(StoreError):
    pass


class UnknownDataset(StoreError):
    pass


class InvalidChoice(StoreError):
    """Final choice or discard that violates the record's invariants."""


def _atomic_write_json(path: Path, payload: dict) -> None:
    tmp = path.with_name(path.name + f".tmp-{os.getpid()}-{threading.get_ident()}")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


class RunStore:
    def __init__(self, root):
        self.root = Path(root)
        (self.root / "runs").mkdir(parents=True, exist_ok=True)
        (self.root / "datasets").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- locking ------------------------------------------------------------

    def _lock(self, run_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(run_id, threading.Lock())

    # -- datasets -----------------------------------------------------------

    def register_dataset(self, csv_bytes: bytes, meta: dict) -> str:
        dataset_id = uuid.uuid4().hex[:12]
        d = self.root / "datasets" / dataset_id
        d.mkdir(parents=True)
        (d / "source.csv").write_bytes(csv_bytes)
        _atomic_write_json(d / "meta.json", {"dataset_id": dataset_id, **meta})
        return dataset_id

    def dataset_meta(self, dataset_id: str) -> dict:
        path = self.root / "datasets" / dataset_id / "meta.json"
        if not path.exists():
            raise UnknownDataset(dataset_id)
        return json.loads(path.read_text())

    def dataset_csv_path(self, dataset_id: str) -> Path:
        path = self.root / "datasets" / dataset_id / "source.csv"
        if not path.exists():
            raise UnknownDataset(dataset_id)
        return path

    # -- runs ---------------------------------------------------------------

    def _run_dir(self, run_id: str) -> Path:
        return self.root / "runs" / run_id

    def _record_path(self, run_id: str) -> Path:
        return self._run_dir(run_id) / "record.json"

    def _index_path(self) -> Path:
        return self.root / "runs" / "index.json"

    def create_run(self, config, dataset_ref: dict, classifier: str, options: dict | None = None) -> str:
        config_dict = config.as_dict() if hasattr(config, "as_dict") else dict(config)
        run_id = uuid.uuid4().hex[:12]
        record = {
            "run_id": run_id,
            "status": "Pending",
            "config": config_dict,
            "dataset": dataset_ref,
            "classifier": classifier,
            "options": options or {},
            "progress": {
                "evaluations_done": 0,
                "max_evaluations": config_dict["max_evaluations"],
            },
            "solutions": None,
            "evaluation_count": None,
            "final_choice": None,
            "final_choice_history": 0,
            "discarded_solution_ids": [],
            "error": None,
            "created_at": time.time(),
        }
        with self._lock(run_id):
            self._run_dir(run_id).mkdir(parents=True)
            _atomic_write_json(self._record_path(run_id), record)
        with self._registry_lock:
            ids = self.list_runs()
            ids.append(run_id)
            _atomic_write_json(self._index_path(), {"run_ids": ids})
        return run_id

    def list_runs(self) -> list[str]:
        path = self._index_path()
        if not path.exists():
            return []
        return list(json.loads(path.read_text())["run_ids"])

    def get(self, run_id: str) -> dict:
        path = self._record_path(run_id)
        if not path.exists():
            raise UnknownRun(run_id)
        return json.loads(path.read_text())

    def _update(self, run_id: str, mutate) -> dict:
        with self._lock(run_id):
            record = self.get(run_id)
            mutate(record)
            _atomic_write_json(self._record_path(run_id), record)
            return record

    def mark_running(self, run_id: str) -> dict:
        def mutate(r):
            if r["status"] != "Pending":
                raise StoreError(f"cannot start run in status {r['status']}")
            r["status"] = "Running"
            r["started_at"] = time.time()

        return self._update(run_id, mutate)

    def update_progress(self, run_id: str, evaluations_done: int) -> dict:
        def mutate(r):
            r["progress"]["evaluations_done"] = max(
                int(evaluations_done), r["progress"]["evaluations_done"]
            )

        return self._update(run_id, mutate)

    def save_front(self, run_id: str, solutions: list[dict], evaluation_count: int, provenance: dict) -> dict:
        def mutate(r):
            if r["status"] not in ("Running", "Pending"):
                raise StoreError(f"cannot save front in status {r['status']}")
            r["solutions"] = solutions
            r["evaluation_count"] = int(evaluation_count)
            r["provenance"] = provenance
            r["progress"]["evaluations_done"] = max(
                int(evaluation_count), r["progress"]["evaluations_done"]
            )

        return self._update(run_id, mutate)

    def save_report(self, run_id: str, report: dict) -> dict:
        def mutate(r):
            if r["solutions"] is None:
                raise StoreError("cannot save a report before the front")
            _atomic_write_json(self._run_dir(run_id) / "report.json", report)
            r["status"] = "Done"
            r["finished_at"] = time.time()

        return self._update(run_id, mutate)

    def get_report(self, run_id: str) -> dict | None:
        if not self._record_path(run_id).exists():
            raise UnknownRun(run_id)
        path = self._run_dir(run_id) / "report.json"
        if not path.exists():
            return None
        return json.loads(path.read_text())

    def mark_failed(self, run_id: str, error: str, partial_solutions: list[dict] | None = None) -> dict:
        def mutate(r):
            r["status"] = "Failed"
            r["error"] = str(error)
            r["finished_at"] = time.time()
            if partial_solutions is not None:
                r["solutions"] = partial_solutions

        return self._update(run_id, mutate)

    def discard_solutions(self, run_id: str, solution_ids: list[int]) -> dict:
        def mutate(r):
            if r["status"] != "Done":
                raise StoreError("run is not finished")
            known = {s["id"] for s in r["solutions"]}
            bad = [i for i in solution_ids if i not in known]
            if bad:
                raise InvalidChoice(f"unknown solution ids: {bad}")
            if r["final_choice"] and r["final_choice"]["solution_id"] in solution_ids:
                raise InvalidChoice("cannot discard the committed final choice")
            merged = set(r["discarded_solution_ids"]) | set(int(i) for i in solution_ids)
            if len(merged) >= len(known):
                raise InvalidChoice("cannot discard every solution")
            r["discarded_solution_ids"] = sorted(merged)

        return self._update(run_id, mutate)

    def set_final_choice(self, run_id: str, solution_id: int, note: str = "") -> dict:
        def mutate(r):
            if r["status"] != "Done":
                raise StoreError("run is not finished")
            known = {s["id"] for s in r["solutions"]}
            if solution_id not in known:
                raise InvalidChoice(f"unknown solution id: {solution_id}")
            if solution_id in r["discarded_solution_ids"]:
                raise InvalidChoice(f"solution {solution_id} is discarded")
            r["final_choice"] = {
                "solution_id": int(solution_id),
                "chosen_at": time.time(),
                "note": note,
            }
            r["final_choice_history"] += 1

        return self._update(run_id, mutate)
