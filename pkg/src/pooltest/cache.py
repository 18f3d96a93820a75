import hashlib
import json
import sqlite3
from pathlib import Path
from typing import Any, Optional

from pooltest.graph_io import Graph


class StrategyCache:
    """
    SQLite cache for expensive, deterministic results such as the hierarchical
    pooling permutation of a dataset.
    """
    def __init__(self, db_path: Path):
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._init_cache_table()

    def _get_conn(self):
        return sqlite3.connect(str(self.db_path))

    def _init_cache_table(self):
        with self._get_conn() as conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS strategies (
                    fingerprint TEXT,
                    key TEXT,
                    value TEXT, -- JSON payload
                    updated_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
                    PRIMARY KEY (fingerprint, key)
                )
            """)

    def get(self, fingerprint: str, key: str) -> Optional[Any]:
        with self._get_conn() as conn:
            row = conn.execute(
                "SELECT value FROM strategies WHERE fingerprint = ? AND key = ?",
                (fingerprint, key)
            ).fetchone()
        return json.loads(row[0]) if row else None

    def set(self, fingerprint: str, key: str, value: Any):
        with self._get_conn() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO strategies (fingerprint, key, value, updated_at) VALUES (?, ?, ?, CURRENT_TIMESTAMP)",
                (fingerprint, key, json.dumps(value))
            )

    def invalidate(self, fingerprint: str, key: Optional[str] = None):
        with self._get_conn() as conn:
            if key:
                conn.execute("DELETE FROM strategies WHERE fingerprint = ? AND key = ?", (fingerprint, key))
            else:
                conn.execute("DELETE FROM strategies WHERE fingerprint = ?", (fingerprint,))


def graph_fingerprint(graph: Graph) -> str:
    """Content hash of a graph's labelled edge set and node count."""
    digest = hashlib.sha256(f"n={graph.n}\n".encode())
    for u, w in graph.labelled_edges():
        digest.update(f"{u} {w}\n".encode())
    return digest.hexdigest()[:32]
