"""
# Parser

Recursive-descent readers for ASCII OFF and the v/f subset of OBJ. Both
produce an `HscMesh`; polygons with more than three corners are split into a
fan anchored at the polygon's first listed vertex.

## OFF

    OFF
    n_v n_f [n_e]
    x y z [ignored...]        (n_v lines)
    k i0 i1 ... i(k-1) [ignored...]   (n_f lines)

The header may share its line with the counts ("OFF 3 1 0").

## OBJ

Only `v` and `f` records are read; every other record (vt, vn, g, o, s,
usemtl, mtllib, ...) is skipped. Face corners may be `i`, `i/t`, `i//n` or
`i/t/n`; only `i` is used. Indices are 1-based and negative indices count
back from the most recent vertex.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from hsc.error import HscError, HscParseError
from hsc.meshio.hsc_lexer import tokenize
from hsc.meshio.hsc_lexer_types import HscToken, HscTokenType
from hsc.meshio.hsc_mesh import HscMesh
from hsc.meshio.hsc_token_stream import TokenStream

logger = logging.getLogger(__name__)


def decode_text(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("ascii")
    except UnicodeDecodeError as e:
        lineno = data[: e.start].count(b"\n") + 1
        raise HscParseError("input is not ASCII text", lineno=lineno) from e


def raise_error(
    stream: TokenStream, token: Optional[HscToken], message: str
) -> None:
    if token is None:
        # Point at the end of the input.
        lineno = stream.text.count("\n") + 1
        position = max(len(stream.text.rstrip("\n")) - 1, 0)
        message = f"unexpected end of input, {message}"
        rendered = (
            HscError.create_error_string(
                stream.text, position, position + 1, message
            )
            if stream.text
            else f"> Error: {message}\n"
        )
    else:
        lineno = token.lineno
        rendered = HscError.create_error_string(
            stream.text, token.start_position, token.end_position, message
        )
    raise HscParseError(message, lineno=lineno, rendered=rendered)


def eat_token(stream: TokenStream, expected_type: HscTokenType) -> HscToken:
    token = stream.get_token()
    if token is None or token.token_type != expected_type:
        got = "nothing" if token is None else repr(token.as_str())
        raise_error(stream, token, f"expected {expected_type.name}, got {got}")
    stream.next_token()
    return token


def eat_integer(stream: TokenStream) -> Tuple[int, HscToken]:
    token = eat_token(stream, HscTokenType.INTEGER)
    return int(token.as_str()), token


def eat_coordinate(stream: TokenStream) -> Tuple[float, HscToken]:
    token = stream.get_token()
    if token is None or not token.is_number():
        got = "nothing" if token is None else repr(token.as_str())
        raise_error(stream, token, f"expected a coordinate, got {got}")
    value = float(token.as_str())
    if not np.isfinite(value):
        raise_error(stream, token, f"non-finite coordinate {token.as_str()}")
    stream.next_token()
    return value, token


def fan_triangulate(polygon: List[int]) -> List[Tuple[int, int, int]]:
    anchor = polygon[0]
    return [
        (anchor, polygon[i], polygon[i + 1]) for i in range(1, len(polygon) - 1)
    ]


class Parser:
    def __init__(self, stream: TokenStream):
        self.stream = stream
        self.vertices: List[Tuple[float, float, float]] = []
        self.faces: List[Tuple[int, int, int]] = []

    def add_polygon(self, polygon: List[int], tokens: List[HscToken]):
        for triangle in fan_triangulate(polygon):
            if len(set(triangle)) != 3:
                raise_error(
                    self.stream,
                    tokens[0],
                    f"face {list(polygon)} has repeated vertices",
                )
            self.faces.append(triangle)

    def parse_vertex(self) -> HscToken:
        x, _ = eat_coordinate(self.stream)
        y, _ = eat_coordinate(self.stream)
        z, last = eat_coordinate(self.stream)
        self.vertices.append((x, y, z))
        return last

    ############################################################################
    ### OFF
    ############################################################################

    def parse_off_header(self) -> Tuple[int, int]:
        token = self.stream.get_token()
        if token is None or token.as_str() != "OFF":
            got = "nothing" if token is None else repr(token.as_str())
            raise_error(self.stream, token, f"expected 'OFF' header, got {got}")
        self.stream.next_token()
        n_vertices, nv_token = eat_integer(self.stream)
        n_faces, nf_token = eat_integer(self.stream)
        if n_vertices < 0 or n_faces < 0:
            raise_error(self.stream, nv_token, "negative element count")
        # The edge count is optional and unused.
        self.stream.skip_line(nf_token.lineno)
        return n_vertices, n_faces

    def parse_off_face(self, n_vertices: int):
        k, k_token = eat_integer(self.stream)
        if k < 3:
            raise_error(
                self.stream,
                k_token,
                f"a face needs 3 or more vertices, got {k}",
            )
        polygon: List[int] = []
        tokens: List[HscToken] = [k_token]
        for _ in range(k):
            index, token = eat_integer(self.stream)
            if index not in range(n_vertices):
                raise_error(
                    self.stream,
                    token,
                    f"face index {index} out of range [0, {n_vertices})",
                )
            polygon.append(index)
            tokens.append(token)
        self.stream.skip_line(tokens[-1].lineno)
        self.add_polygon(polygon, tokens)

    def parse_off(self) -> HscMesh:
        n_vertices, n_faces = self.parse_off_header()
        for _ in range(n_vertices):
            last = self.parse_vertex()
            self.stream.skip_line(last.lineno)
        for _ in range(n_faces):
            self.parse_off_face(n_vertices)
        trailing = self.stream.get_token()
        if trailing is not None:
            raise_error(self.stream, trailing, "unexpected data after faces")
        return self.build_mesh()

    ############################################################################
    ### OBJ
    ############################################################################

    def parse_obj_reference(self) -> Tuple[int, HscToken]:
        token = self.stream.get_token()
        if token is None or token.token_type not in {
            HscTokenType.INTEGER,
            HscTokenType.REFERENCE,
        }:
            got = "nothing" if token is None else repr(token.as_str())
            raise_error(
                self.stream, token, f"expected a face corner, got {got}"
            )
        self.stream.next_token()
        raw = int(token.as_str().split("/")[0])
        n_vertices = len(self.vertices)
        index = raw - 1 if raw > 0 else n_vertices + raw
        if raw == 0 or index not in range(n_vertices):
            raise_error(
                self.stream,
                token,
                f"face index {raw} out of range for {n_vertices} vertices",
            )
        return index, token

    def parse_obj_face(self, f_token: HscToken):
        polygon: List[int] = []
        tokens: List[HscToken] = [f_token]
        token = self.stream.get_token()
        while token is not None and token.lineno == f_token.lineno:
            index, token = self.parse_obj_reference()
            polygon.append(index)
            tokens.append(token)
            token = self.stream.get_token()
        if len(polygon) < 3:
            raise_error(
                self.stream,
                f_token,
                f"a face needs 3 or more vertices, got {len(polygon)}",
            )
        self.add_polygon(polygon, tokens)

    def parse_obj(self) -> HscMesh:
        token = self.stream.get_token()
        while token is not None:
            self.stream.next_token()
            if token.as_str() == "v":
                last = self.parse_vertex()
                # Optional w component.
                self.stream.skip_line(last.lineno)
            elif token.as_str() == "f":
                self.parse_obj_face(token)
            else:
                self.stream.skip_line(token.lineno)
            token = self.stream.get_token()
        return self.build_mesh()

    def build_mesh(self) -> HscMesh:
        vertices = np.array(self.vertices, dtype=np.float64).reshape(-1, 3)
        faces = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        logger.debug(
            "parsed %d vertices, %d triangles", len(vertices), len(faces)
        )
        return HscMesh(vertices, faces)


def parse_off(data: bytes | str) -> HscMesh:
    text = decode_text(data)
    stream = TokenStream(text, tokenize(text))
    return Parser(stream).parse_off()


def parse_obj(data: bytes | str) -> HscMesh:
    text = decode_text(data)
    stream = TokenStream(text, tokenize(text))
    return Parser(stream).parse_obj()
