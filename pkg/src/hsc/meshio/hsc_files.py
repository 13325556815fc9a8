import logging
import os
import tempfile
from pathlib import Path

from hsc.error import HscIOError, HscUsageError
from hsc.meshio.hsc_emitter import DEFAULT_PRECISION, write_off
from hsc.meshio.hsc_mesh import HscMesh
from hsc.meshio.hsc_parser import parse_obj, parse_off

logger = logging.getLogger(__name__)


def read_bytes(path: Path) -> bytes:
    try:
        with path.open("rb") as f:
            return f.read()
    except OSError as e:
        raise HscIOError(f"cannot read '{path}': {e.strerror}") from e


def atomic_write_bytes(path: Path, data: bytes):
    """Write through a temporary file in the destination directory so that a
    failure never leaves a partial file behind."""
    directory = path.parent if str(path.parent) else Path(".")
    try:
        fd, tmp_name = tempfile.mkstemp(
            prefix=f".{path.name}.", suffix=".tmp", dir=directory
        )
    except OSError as e:
        raise HscIOError(f"cannot write '{path}': {e.strerror}") from e
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, path)
    except OSError as e:
        if os.path.exists(tmp_name):
            os.remove(tmp_name)
        raise HscIOError(f"cannot write '{path}': {e.strerror}") from e


def read_mesh(path: Path) -> HscMesh:
    suffix = path.suffix.lower()
    if suffix not in {".off", ".obj"}:
        raise HscUsageError(
            f"unsupported mesh format '{path.suffix}' for '{path}' (use .off or .obj)"
        )
    data = read_bytes(path)
    mesh = parse_obj(data) if suffix == ".obj" else parse_off(data)
    logger.info(
        "read '%s': %d vertices, %d faces", path, mesh.n_vertices, mesh.n_faces
    )
    return mesh


def write_mesh(path: Path, mesh: HscMesh, precision: int = DEFAULT_PRECISION):
    if path.suffix.lower() != ".off":
        raise HscUsageError(f"meshes are written as OFF, got '{path}'")
    atomic_write_bytes(path, write_off(mesh, precision))
