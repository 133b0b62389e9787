"""Regenerate openapi.json from the app factory.

Run from the repository root: python3 scripts/export_openapi.py
"""

import json
import sys
import tempfile
from pathlib import Path

from allocwise.api import create_app
from allocwise.config import Config


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(Config(store_dir=tmp))
        doc = app.openapi()
    out = Path(__file__).resolve().parent.parent / "openapi.json"
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
