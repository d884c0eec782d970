"""On-disk JSON cache for Eisenstein bases and product classes.

Entries are keyed by a hash of (kind, parameters, CODE_VERSION), so bumping the
version invalidates everything written by older code.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path

import numpy as np

CODE_VERSION = "toricforms-0.1.0/cache-1"
ENV_VAR = "TORICFORMS_CACHE_DIR"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "toricforms"


class DiskCache:
    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def _path(self, kind: str, params: dict) -> Path:
        blob = json.dumps({"kind": kind, "params": params, "version": CODE_VERSION}, sort_keys=True)
        digest = hashlib.sha256(blob.encode()).hexdigest()[:32]
        return self.root / kind / f"{digest}.json"

    def get(self, kind: str, params: dict) -> dict | None:
        path = self._path(kind, params)
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError):
            return None
        if data.get("version") != CODE_VERSION or data.get("params") != params:
            return None
        return data["payload"]

    def put(self, kind: str, params: dict, payload: dict) -> None:
        path = self._path(kind, params)
        path.parent.mkdir(parents=True, exist_ok=True)
        body = json.dumps({"version": CODE_VERSION, "params": params, "payload": payload}, sort_keys=True)
        # atomic publish so concurrent workers never read a partial file
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(body)
        os.replace(tmp, path)


def warm_eisenstein(l: int, prec: int, cache: DiskCache):
    """Load the Eisenstein basis for (l, prec) from the cache, computing and storing it on a miss."""
    from . import qseries

    key = (l, prec)
    if key in qseries._EIS_CACHE:
        return qseries._EIS_CACHE[key]
    params = {"level": l, "prec": prec}
    data = cache.get("eisenstein", params)
    if data is not None:
        b = qseries.EisBasis.from_rows(l, prec, data["rows"], data["toricRank"], data["supplemented"])
    else:
        b = qseries.EisBasis(l, prec)
        cache.put(
            "eisenstein",
            params,
            {"rows": b.rows_json(), "toricRank": b.toric_rank, "supplemented": b.supplemented},
        )
    qseries._EIS_CACHE[key] = b
    return b


def warm_products(l: int, prec: int, cache: DiskCache):
    """Load or compute the classes of s_a s_b mod E(l) for the representative pairs."""
    from .toric import ModEisClass, product_table

    warm_eisenstein(l, prec, cache)
    table = product_table(l, prec)
    params = {"level": l, "prec": prec}
    data = cache.get("products", params)
    if data is not None:
        for item in data["classes"]:
            num = np.array([[int(x) for x in row] for row in item["num"]], dtype=object)
            if num.size == 0:
                num = num.reshape(item["shape"])
            table._cls[(item["a"], item["b"])] = ModEisClass(l, prec, num, int(item["den"]))
        return table
    items = []
    for a, b in table.representative_pairs():
        c = table.cls(a, b)
        items.append(
            {
                "a": a,
                "b": b,
                "den": str(c.den),
                "shape": list(c.num.shape),
                "num": [[str(int(x)) for x in row] for row in c.num],
            }
        )
    cache.put("products", params, {"classes": items})
    return table
