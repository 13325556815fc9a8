"""
Take a mesh and emit ASCII OFF.

Output uses LF line endings, a fixed number of decimals for every coordinate
and an edge count of 0 (readers ignore it).
"""

from typing import List

from hsc.error import HscUsageError
from hsc.meshio.hsc_mesh import HscMesh

DEFAULT_PRECISION = 9


def emit_coordinate(value: float, precision: int) -> str:
    text = f"{value:.{precision}f}"
    # "-0.000" would round-trip as 0.0 anyway; keep the file canonical.
    if float(text) == 0.0:
        return f"{0.0:.{precision}f}"
    return text


def emit_vertices(mesh: HscMesh, precision: int) -> List[str]:
    return [
        " ".join(emit_coordinate(float(c), precision) for c in vertex)
        for vertex in mesh.vertices
    ]


def emit_faces(mesh: HscMesh) -> List[str]:
    return [f"3 {a} {b} {c}" for a, b, c in mesh.faces.tolist()]


def write_off(mesh: HscMesh, precision: int = DEFAULT_PRECISION) -> bytes:
    if precision < 0:
        raise HscUsageError(f"precision must be nonnegative, got {precision}")
    lines = ["OFF", f"{mesh.n_vertices} {mesh.n_faces} 0"]
    lines.extend(emit_vertices(mesh, precision))
    lines.extend(emit_faces(mesh))
    return ("\n".join(lines) + "\n").encode("ascii")
