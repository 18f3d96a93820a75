import gzip
import io
import logging
import zipfile
from pathlib import Path
from typing import Dict, List, Optional

import requests
import yaml
from pydantic import BaseModel

from pooltest.errors import DatasetFetchError, DatasetMissingError, InvalidParameterError
from pooltest.graph_io import Graph, generate_small_world, karate_club, load_edge_list, load_gml
from pooltest.models import CleanupPolicy
from pooltest.settings import CONFIG_DIR, PoolTestSettings

logger = logging.getLogger("pooltest.datasets")

MANIFEST_PATH = CONFIG_DIR / "datasets.yaml"
BUILTIN = ("karate", "small-world")
FETCH_TIMEOUT = 120


class ExpectedSize(BaseModel):
    n: int
    m: int


class DatasetEntry(BaseModel):
    name: str
    description: str = ""
    url: str
    archive: str = "none"
    file: str
    format: str = "edgelist"
    cleanup: CleanupPolicy = CleanupPolicy.NONE
    expected: Optional[ExpectedSize] = None


def load_manifest(path: Path = MANIFEST_PATH) -> Dict[str, DatasetEntry]:
    try:
        with open(path, "r") as f:
            raw = yaml.safe_load(f) or {}
    except FileNotFoundError:
        logger.warning("dataset manifest %s not found", path)
        raw = {}
    return {name: DatasetEntry(name=name, **body) for name, body in raw.items()}


class DatasetRegistry:
    """Resolves dataset names (built-in, manifest, or an edge-list path) to graphs."""

    def __init__(self, settings: Optional[PoolTestSettings] = None, manifest_path: Path = MANIFEST_PATH):
        self.settings = settings or PoolTestSettings()
        self.data_dir = Path(self.settings.data_dir)
        self.manifest = load_manifest(manifest_path)

    def names(self) -> List[str]:
        return list(BUILTIN) + list(self.manifest)

    def path_for(self, name: str) -> Path:
        return self.data_dir / self._entry(name).file

    def is_present(self, name: str) -> bool:
        if name in BUILTIN:
            return True
        return self.path_for(name).exists()

    def _entry(self, name: str) -> DatasetEntry:
        if name not in self.manifest:
            raise InvalidParameterError(f"unknown dataset {name!r}; known: {', '.join(self.names())}")
        return self.manifest[name]

    def fetch(self, name: str, force: bool = False) -> Path:
        entry = self._entry(name)
        target = self.path_for(name)
        if target.exists() and not force:
            logger.info("%s already present at %s", name, target)
            return target

        try:
            response = requests.get(entry.url, timeout=FETCH_TIMEOUT)
            response.raise_for_status()
        except requests.exceptions.HTTPError as e:
            raise DatasetFetchError(f"HTTP {e.response.status_code} while fetching {entry.url}") from e
        except requests.exceptions.ConnectionError as e:
            raise DatasetFetchError(f"cannot connect to {entry.url}") from e
        except requests.exceptions.RequestException as e:
            raise DatasetFetchError(f"error fetching {entry.url}: {e}") from e

        payload = self._unpack(entry, response.content)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(payload)
        logger.info("fetched %s -> %s (%d bytes)", name, target, len(payload))
        return target

    @staticmethod
    def _unpack(entry: DatasetEntry, content: bytes) -> bytes:
        try:
            if entry.archive == "gz":
                return gzip.decompress(content)
            if entry.archive == "zip":
                with zipfile.ZipFile(io.BytesIO(content)) as zf:
                    member = next((m for m in zf.namelist() if Path(m).name == entry.file), None)
                    if member is None:
                        raise DatasetFetchError(f"{entry.file} not found in archive from {entry.url}")
                    return zf.read(member)
        except (OSError, zipfile.BadZipFile) as e:
            raise DatasetFetchError(f"cannot unpack {entry.archive} archive from {entry.url}: {e}") from e
        return content

    def load(self, name: str, cleanup: Optional[CleanupPolicy] = None) -> Graph:
        """Load a dataset. ``cleanup`` overrides the manifest policy."""
        if name == "karate":
            return karate_club()
        if name == "small-world":
            return generate_small_world()
        if name not in self.manifest:
            path = Path(name)
            if path.is_file():
                return load_edge_list(path, cleanup=cleanup or CleanupPolicy.NONE)
            raise InvalidParameterError(f"unknown dataset {name!r}; known: {', '.join(self.names())}, or an edge-list file")

        entry = self.manifest[name]
        path = self.path_for(name)
        if not path.exists():
            raise DatasetMissingError(
                f"dataset {name!r} not found at {path}; run `pooltest dataset fetch {name}` "
                f"(or set POOLTEST_DATA_DIR to where it lives)"
            )
        policy = cleanup or entry.cleanup
        graph = load_gml(path, cleanup=policy) if entry.format == "gml" else load_edge_list(path, cleanup=policy)

        if entry.expected and (graph.n, graph.m) != (entry.expected.n, entry.expected.m):
            logger.warning(
                "%s: got n=%d m=%d after %s cleanup, manifest expects n=%d m=%d",
                name, graph.n, graph.m, policy.value, entry.expected.n, entry.expected.m,
            )
        return graph
