"""
Output writing for golflab.

CSV and JSON writers return the SHA-256 digest of the exact bytes they
wrote, so manifests can certify an output without re-reading it.
"""

import csv
import hashlib
import io
import json
import logging
import os
import zipfile
from datetime import datetime
from typing import Dict, List, Optional, Sequence

from run_store import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = '.manifest.json'


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def csv_bytes(rows: Sequence[Dict], fieldnames: Optional[List[str]] = None) -> bytes:
    """Rows rendered as comma-separated text with a header row."""
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    buffer = io.StringIO(newline='')
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue().encode('utf-8')


def json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + '\n').encode('utf-8')


def _write(data: bytes, path: Optional[str]) -> str:
    if path is not None:
        directory = os.path.dirname(os.path.abspath(path))
        if not os.path.exists(directory):
            os.makedirs(directory)
        with open(path, 'wb') as f:
            f.write(data)
        logger.info("Wrote %d bytes to %s", len(data), path)
    return sha256(data)


def write_csv(rows: Sequence[Dict], path: Optional[str], fieldnames: Optional[List[str]] = None) -> str:
    """Write rows as CSV and return the digest; path None only computes the digest."""
    return _write(csv_bytes(rows, fieldnames), path)


def write_json(obj, path: Optional[str]) -> str:
    """Write obj as UTF-8 JSON with sorted keys and return the digest."""
    return _write(json_bytes(obj), path)


def manifest_path(output_path: str) -> str:
    return output_path + MANIFEST_SUFFIX


def write_manifest(manifest: RunManifest, path: Optional[str] = None) -> str:
    """Write the manifest next to its output (``<output>.manifest.json``) and return its path."""
    path = path or manifest_path(manifest.output_path)
    _write(json_bytes(manifest.to_json_dict()), path)
    return path


def read_manifest(path: str) -> RunManifest:
    with open(path, 'r', encoding='utf-8') as f:
        return RunManifest.from_json_dict(json.load(f))


def archive_run(paths: Sequence[str], zip_path: str, manifest: Optional[RunManifest] = None) -> str:
    """Bundle output files and a README into a zip archive."""
    directory = os.path.dirname(os.path.abspath(zip_path))
    if not os.path.exists(directory):
        os.makedirs(directory)

    included = [p for p in paths if os.path.exists(p)]
    with zipfile.ZipFile(zip_path, 'w', zipfile.ZIP_DEFLATED) as zipf:
        for path in included:
            zipf.write(path, os.path.basename(path))

        listing = '\n'.join(f"- {os.path.basename(p)}" for p in included) or '- (no files)'
        readme_content = f"""golflab run archive
Created: {datetime.now().strftime("%Y-%m-%d %H:%M:%S")}

This archive contains:
{listing}
"""
        if manifest is not None:
            readme_content += f"""
Subcommand: {manifest.subcommand}
Master seed: {manifest.master_seed}
Tool version: {manifest.tool_version}
Output digest: {manifest.output_digest}

To reproduce:
1. Extract this zip file
2. Run: python main.py manifest replay {os.path.basename(manifest_path(manifest.output_path))}
"""
        zipf.writestr("README.txt", readme_content)

    logger.info("Archived %d files into %s", len(included), zip_path)
    return zip_path
