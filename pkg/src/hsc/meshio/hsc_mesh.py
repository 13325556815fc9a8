from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

frozen_dataclass = dataclass(frozen=True)


@frozen_dataclass
class HscMesh:
    """Vertex coordinate table plus a triangle list (0-based indices).

    The arrays are copied, cast and made read-only on construction so a mesh
    can be shared between threads.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=np.float64).reshape(-1, 3)
        faces = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        n = vertices.shape[0]
        if not np.all(np.isfinite(vertices)):
            raise ValueError("vertex coordinates must be finite")
        if faces.size and (faces.min() < 0 or faces.max() >= n):
            raise ValueError(f"face index out of range [0, {n})")
        if faces.size and np.any(
            (faces[:, 0] == faces[:, 1])
            | (faces[:, 1] == faces[:, 2])
            | (faces[:, 0] == faces[:, 2])
        ):
            raise ValueError("faces must have 3 distinct indices")
        vertices.setflags(write=False)
        faces.setflags(write=False)
        # NOTE  Frozen dataclasses forbid plain assignment in __post_init__.
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_faces(self) -> int:
        return int(self.faces.shape[0])

    def with_vertices(self, vertices: np.ndarray) -> "HscMesh":
        """Same connectivity, new geometry."""
        return HscMesh(vertices, self.faces)

    def same_connectivity(self, other: "HscMesh") -> bool:
        return self.n_vertices == other.n_vertices and np.array_equal(
            self.faces, other.faces
        )

    def bounding_box_diagonal(self) -> float:
        if self.n_vertices == 0:
            return 0.0
        extent = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(extent))

    def to_dict(self) -> Dict[str, Any]:
        return dict(
            metatype=self.__class__.__name__,
            n_vertices=self.n_vertices,
            n_faces=self.n_faces,
        )


def face_areas(mesh: HscMesh) -> np.ndarray:
    """Half the cross-product magnitude of every face."""
    if mesh.n_faces == 0:
        return np.zeros(0)
    corners = mesh.vertices[mesh.faces]
    cross = np.cross(
        corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0]
    )
    return 0.5 * np.linalg.norm(cross, axis=1)


def surface_area(mesh: HscMesh) -> float:
    return float(face_areas(mesh).sum())
