"""
Synthetic test shapes.

The command line accepts `synthetic:<name>` in place of an input path; the
`--seed` flag only ever reaches this module. Every generator is a pure
function of its arguments.
"""

from typing import Callable, Dict, Tuple

import numpy as np

from hsc.error import HscUsageError
from hsc.meshio.hsc_mesh import HscMesh

SYNTHETIC_PREFIX = "synthetic:"


def icosphere(subdivisions: int) -> HscMesh:
    """Unit sphere from a midpoint-subdivided icosahedron; 10 * 4**s + 2
    vertices."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]  # fmt: skip
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]  # fmt: skip
    points = [np.array(v, dtype=np.float64) for v in vertices]
    for _ in range(subdivisions):
        midpoints: Dict[Tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in midpoints:
                midpoints[key] = len(points)
                points.append((points[a] + points[b]) / 2.0)
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend(
                [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
            )
        faces = refined
    coordinates = np.array(points)
    coordinates /= np.linalg.norm(coordinates, axis=1, keepdims=True)
    return HscMesh(coordinates, np.array(faces))


def bumpy_sphere(subdivisions: int = 4, seed: int = 0) -> HscMesh:
    """Sphere with a few localized, high-frequency ripples."""
    sphere = icosphere(subdivisions)
    rng = np.random.default_rng(seed)
    points = sphere.vertices
    radius = np.ones(sphere.n_vertices)
    for _ in range(6):
        centre = rng.normal(size=3)
        centre /= np.linalg.norm(centre)
        direction = rng.normal(size=3)
        frequency = rng.uniform(12.0, 24.0)
        distance2 = np.sum((points - centre) ** 2, axis=1)
        envelope = np.exp(-distance2 / 0.08)
        radius += 0.06 * envelope * np.cos(frequency * points @ direction)
    return sphere.with_vertices(points * radius[:, None])


def creased_box(resolution: int = 12) -> HscMesh:
    """Cube [-1, 1]^3 with every side an r x r grid: flat regions joined by
    sharp creases, like a machined part. 6 r^2 + 2 vertices."""
    r = resolution
    lookup: Dict[Tuple[int, int, int], int] = {}
    points = []
    faces = []

    def vertex(key: Tuple[int, int, int]) -> int:
        if key not in lookup:
            lookup[key] = len(points)
            points.append(np.array(key, dtype=np.float64) * 2.0 / r - 1.0)
        return lookup[key]

    for axis in range(3):
        u_axis, v_axis = (axis + 1) % 3, (axis + 2) % 3
        for side in (0, r):
            for i in range(r):
                for j in range(r):
                    corners = []
                    for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        key = [0, 0, 0]
                        key[axis] = side
                        key[u_axis] = i + di
                        key[v_axis] = j + dj
                        corners.append(vertex(tuple(key)))
                    a, b, c, d = corners if side else corners[::-1]
                    faces.append((a, b, c))
                    faces.append((a, c, d))
    return HscMesh(np.array(points), np.array(faces))


def grid_patch(nx: int, ny: int) -> HscMesh:
    """Flat unit square sampled on an nx x ny grid; vertex (i, j) has index
    j * nx + i."""
    xs, ys = np.meshgrid(
        np.linspace(0.0, 1.0, nx), np.linspace(0.0, 1.0, ny), indexing="xy"
    )
    points = np.stack([xs.ravel(), ys.ravel(), np.zeros(nx * ny)], axis=1)
    faces = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a = j * nx + i
            faces.append((a, a + 1, a + nx + 1))
            faces.append((a, a + nx + 1, a + nx))
    return HscMesh(points, np.array(faces, dtype=np.int64).reshape(-1, 3))


def random_mesh(seed: int, max_vertices: int = 2000) -> HscMesh:
    """Height field over a jittered grid of random size, with random
    low-frequency relief and noise."""
    rng = np.random.default_rng(seed)
    side = int(np.sqrt(max_vertices))
    nx = int(rng.integers(3, side + 1))
    ny = int(rng.integers(3, max_vertices // nx + 1))
    patch = grid_patch(nx, ny)
    points = patch.vertices.copy()
    points[:, :2] += rng.uniform(-0.2, 0.2, size=(patch.n_vertices, 2)) / max(
        nx, ny
    )
    phase = rng.uniform(0.0, 2.0 * np.pi, size=2)
    points[:, 2] = 0.2 * np.sin(3.0 * points[:, 0] + phase[0]) * np.cos(
        2.0 * points[:, 1] + phase[1]
    ) + 0.01 * rng.normal(size=patch.n_vertices)
    scale = rng.uniform(0.5, 20.0)
    return patch.with_vertices(points * scale)


def planar_curve(n: int = 400, seed: int = 0) -> np.ndarray:
    """Closed planar curve (n x 3, z = 0) that is smooth except for one
    region, an eighth of its length, carrying fine ripples."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    radius = 1.0 + 0.15 * np.cos(2.0 * t + rng.uniform(0, 2 * np.pi))
    radius += 0.05 * np.sin(3.0 * t + rng.uniform(0, 2 * np.pi))
    start = rng.uniform(0.0, 2.0 * np.pi)
    width = 2.0 * np.pi / 8.0
    offset = np.mod(t - start, 2.0 * np.pi)
    inside = offset < width
    window = np.where(inside, np.sin(np.pi * offset / width) ** 2, 0.0)
    radius += 0.08 * window * np.sin(8.0 * 2.0 * np.pi * offset / width)
    return np.stack([radius * np.cos(t), radius * np.sin(t), np.zeros(n)], 1)


SYNTHETIC_MESHES: Dict[str, Callable[[int], HscMesh]] = {
    "bumpy-sphere": lambda seed: bumpy_sphere(4, seed),
    "creased-box": lambda seed: creased_box(20),
    "random": lambda seed: random_mesh(seed),
}


def synthetic_mesh(source: str, seed: int) -> HscMesh:
    """Resolve `synthetic:<name>` (or a bare name) to a generated mesh."""
    name = source
    if source.startswith(SYNTHETIC_PREFIX):
        name = source[len(SYNTHETIC_PREFIX) :]
    if name not in SYNTHETIC_MESHES:
        raise HscUsageError(
            f"unknown synthetic mesh '{name}' "
            f"(choose from {', '.join(sorted(SYNTHETIC_MESHES))})"
        )
    return SYNTHETIC_MESHES[name](seed)
