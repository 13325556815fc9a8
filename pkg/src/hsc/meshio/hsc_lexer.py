"""
# Lexer

Both mesh formats we read (ASCII OFF and the v/f subset of OBJ) are
white-space separated records with '#' line comments, so one lexer serves
both. Every token keeps its character offset and its 1-based line number,
which is what the parsers report on error.

The accepted tokens are (ASCII):

1. integers : [+-]?[0-9]+
2. floats : decimal or scientific notation (nan/inf are lexed, then rejected
   by the parser so the message can name the line)
3. references : OBJ face corners such as 3/1/2, 3//2 or 3/1
4. identifiers : any other run of non-space characters
5. comments : #.* (skipped)
"""

import re
from typing import List

from hsc.meshio.hsc_lexer_types import (
    CharacterStream,
    HscToken,
    classify_lexeme,
)

WORD_PATTERN = re.compile(r"[^\s#]+")
SPACE_PATTERN = re.compile(r"\s+")
COMMENT_PATTERN = re.compile(r"#[^\n]*")


class Lexer:
    def __init__(self, text: str):
        self.stream = CharacterStream(text)
        self.tokens: List[HscToken] = []

    @staticmethod
    def lex_word(stream: CharacterStream) -> HscToken:
        pos, lineno = stream.position, stream.lineno
        match = WORD_PATTERN.match(stream.text, pos)
        assert match is not None
        lexeme = match.group()
        # A word never contains a new line, so the line number is unchanged.
        stream.position = match.end()
        return HscToken(
            lexeme,
            classify_lexeme(lexeme),
            start_position=pos,
            lineno=lineno,
        )

    @staticmethod
    def skip_space(stream: CharacterStream):
        match = SPACE_PATTERN.match(stream.text, stream.position)
        assert match is not None
        stream.lineno += match.group().count("\n")
        stream.position = match.end()

    @staticmethod
    def skip_comment(stream: CharacterStream):
        assert stream.get_char() == "#"
        match = COMMENT_PATTERN.match(stream.text, stream.position)
        stream.position = match.end()

    def tokenize(self):
        while True:
            c = self.stream.get_char()
            if c is None:
                break

            if c.isspace():
                self.skip_space(self.stream)
            elif c == "#":
                self.skip_comment(self.stream)
            else:
                self.tokens.append(self.lex_word(self.stream))


def tokenize(text: str) -> List[HscToken]:
    t = Lexer(text)
    t.tokenize()
    return t.tokens
