"""
Run store for golflab.

Handles SQLite operations for the manifests written next to every output.
"""

import json
import os
import sqlite3
from dataclasses import dataclass
from typing import Dict, List, Optional

from golf_errors import ConfigurationError


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one output byte for byte."""

    subcommand: str
    params: Dict
    master_seed: int
    tool_version: str
    output_path: str
    output_digest: str

    def to_json_dict(self) -> Dict:
        return {
            'subcommand': self.subcommand,
            'params': self.params,
            'master_seed': self.master_seed,
            'tool_version': self.tool_version,
            'output_path': self.output_path,
            'output_digest': self.output_digest,
        }

    @classmethod
    def from_json_dict(cls, data: Dict) -> 'RunManifest':
        try:
            return cls(data['subcommand'], dict(data['params']), int(data['master_seed']),
                       str(data['tool_version']), str(data['output_path']), str(data['output_digest']))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigurationError(f"Malformed manifest: {e}")


class RunStore:
    """Manages the SQLite table of run manifests."""

    def __init__(self, db_path: str = "golflab_runs.db"):
        """Initialize the store with the given database path."""
        self.db_path = db_path
        directory = os.path.dirname(os.path.abspath(db_path))
        if not os.path.exists(directory):
            os.makedirs(directory)
        self.init_database()

    def init_database(self):
        """Initialize the database with the manifest table."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS run_manifests (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                subcommand TEXT NOT NULL,
                params_json TEXT NOT NULL,
                master_seed INTEGER NOT NULL,
                tool_version TEXT NOT NULL,
                output_path TEXT,
                output_digest TEXT NOT NULL,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
        ''')
        cursor.execute('CREATE INDEX IF NOT EXISTS idx_manifests_digest ON run_manifests(output_digest)')
        cursor.execute('CREATE INDEX IF NOT EXISTS idx_manifests_subcommand ON run_manifests(subcommand)')

        conn.commit()
        conn.close()

    def add_manifest(self, manifest: RunManifest) -> int:
        """Store a manifest and return its id."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('''
            INSERT INTO run_manifests
            (subcommand, params_json, master_seed, tool_version, output_path, output_digest)
            VALUES (?, ?, ?, ?, ?, ?)
        ''', (
            manifest.subcommand,
            json.dumps(manifest.params, sort_keys=True),
            manifest.master_seed,
            manifest.tool_version,
            manifest.output_path,
            manifest.output_digest,
        ))

        manifest_id = cursor.lastrowid
        conn.commit()
        conn.close()
        return manifest_id

    @staticmethod
    def _row_to_dict(row: sqlite3.Row) -> Dict:
        record = dict(row)
        record['params'] = json.loads(record.pop('params_json'))
        return record

    def get_manifest(self, manifest_id: int) -> Optional[Dict]:
        """Get a stored manifest by id."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        cursor = conn.cursor()

        cursor.execute('SELECT * FROM run_manifests WHERE id = ?', (manifest_id,))
        row = cursor.fetchone()
        conn.close()
        return self._row_to_dict(row) if row else None

    def get_manifests(self, subcommand: Optional[str] = None) -> List[Dict]:
        """All manifests in insertion order, optionally for one subcommand."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        cursor = conn.cursor()

        if subcommand is None:
            cursor.execute('SELECT * FROM run_manifests ORDER BY id')
        else:
            cursor.execute('SELECT * FROM run_manifests WHERE subcommand = ? ORDER BY id', (subcommand,))
        records = [self._row_to_dict(row) for row in cursor.fetchall()]
        conn.close()
        return records

    def find_by_digest(self, digest: str) -> List[Dict]:
        """Manifests whose output had the given digest."""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        cursor = conn.cursor()

        cursor.execute('SELECT * FROM run_manifests WHERE output_digest = ? ORDER BY id', (digest,))
        records = [self._row_to_dict(row) for row in cursor.fetchall()]
        conn.close()
        return records

    def get_store_stats(self) -> Dict:
        """Number of stored runs per subcommand."""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute('SELECT subcommand, COUNT(*) FROM run_manifests GROUP BY subcommand ORDER BY subcommand')
        per_subcommand = {name: count for name, count in cursor.fetchall()}
        conn.close()

        return {
            'total_runs': sum(per_subcommand.values()),
            'per_subcommand': per_subcommand,
        }
