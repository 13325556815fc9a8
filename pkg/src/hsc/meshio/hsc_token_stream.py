from typing import List, Optional

from hsc.meshio.hsc_lexer_types import HscToken


class TokenStream:
    """Cursor over the tokens of one mesh file. Mesh records are line based,
    so besides single steps the cursor can drop the rest of a line."""

    def __init__(self, text: str, tokens: List[HscToken]) -> None:
        # The text is kept for error rendering only.
        self.text = text
        self.tokens = tokens
        self.position = 0

    @property
    def at_end(self) -> bool:
        return self.position >= len(self.tokens)

    def get_token(self, *, offset: int = 0) -> Optional[HscToken]:
        """The token `offset` places ahead, or None past either end. The
        cursor does not move."""
        index = self.position + offset
        return self.tokens[index] if 0 <= index < len(self.tokens) else None

    def next_token(self):
        if not self.at_end:
            self.position += 1

    def skip_line(self, lineno: int):
        """Drop every remaining token on line `lineno` (e.g. vertex colours
        after the coordinates, or OBJ records we do not read)."""
        while not self.at_end and self.tokens[self.position].lineno == lineno:
            self.position += 1
