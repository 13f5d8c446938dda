"""Boot the HTTP service with a freshly generated demo dataset registered,
print the curl commands to drive it, and block until interrupted."""

import argparse
import tempfile
from pathlib import Path

import uvicorn

from mofs.service import create_app
from mofs.synth import write_credit_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--port", type=int, default=8080)
    parser.add_argument("--data-dir", default="mofs_data")
    parser.add_argument("--ui-dir", default=None)
    args = parser.parse_args()

    app = create_app(args.data_dir, ui_dir=args.ui_dir)
    with tempfile.TemporaryDirectory() as tmp:
        csv_path = Path(tmp) / "credit.csv"
        write_credit_csv(csv_path, seed=0)
        dataset_id = app.state.store.register_dataset(
            csv_path.read_bytes(),
            {"target": "credit_risk", "sensitive": "sex", "positive_label": "good", "name": "synth-credit"},
        )
    print(f"demo dataset registered: {dataset_id}")
    print(f"launch a run:  curl -X POST localhost:{args.port}/runs "
          f"-H 'content-type: application/json' "
          f"-d '{{\"dataset_id\": \"{dataset_id}\", \"classifier\": \"lr\"}}'")
    print(f"poll it:       curl localhost:{args.port}/runs/<run_id>")
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="info")


if __name__ == "__main__":
    main()
