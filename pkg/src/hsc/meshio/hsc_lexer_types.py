import re
from enum import Enum, auto, unique
from typing import Dict, Optional, Union


@unique
class HscTokenType(Enum):
    INTEGER = auto()  # [+-]?[0-9]+
    FLOAT = auto()  # decimal or scientific notation, nan, inf
    REFERENCE = auto()  # OBJ face corner, e.g. 3/1/2 or 3//2
    IDENTIFIER = auto()  # anything else, e.g. OFF, v, f, vt, usemtl


INTEGER_PATTERN = re.compile(r"[+-]?[0-9]+")
FLOAT_PATTERN = re.compile(
    r"[+-]?(([0-9]+\.?[0-9]*|\.[0-9]+)([eE][+-]?[0-9]+)?|nan|inf|infinity)",
    re.IGNORECASE,
)
REFERENCE_PATTERN = re.compile(r"[+-]?[0-9]+(/[+-]?[0-9]*){1,2}")


def classify_lexeme(lexeme: str) -> HscTokenType:
    if INTEGER_PATTERN.fullmatch(lexeme):
        return HscTokenType.INTEGER
    if FLOAT_PATTERN.fullmatch(lexeme):
        return HscTokenType.FLOAT
    if REFERENCE_PATTERN.fullmatch(lexeme):
        return HscTokenType.REFERENCE
    return HscTokenType.IDENTIFIER


class HscToken:
    def __init__(
        self,
        lexeme: str,
        token_type: HscTokenType,
        *,
        start_position: int,
        lineno: int,
    ):
        self.lexeme = lexeme
        self.token_type = token_type

        self.start_position = start_position
        # 1-based, as printed in error messages.
        self.lineno = lineno

    @property
    def end_position(self) -> int:
        return self.start_position + len(self.lexeme)

    def is_number(self) -> bool:
        return self.token_type in {HscTokenType.INTEGER, HscTokenType.FLOAT}

    def as_str(self) -> str:
        return self.lexeme

    def get_token_type_as_str(self) -> str:
        return self.token_type.name

    def __repr__(self):
        return f"HscToken(lexeme={repr(self.lexeme)}, token_type={self.get_token_type_as_str()}, lineno={self.lineno})"

    def to_dict(self) -> Dict[str, Union[str, int]]:
        return dict(
            metatype=self.__class__.__name__,
            lexeme=repr(self.lexeme),
            token_type=self.get_token_type_as_str(),
            start_position=self.start_position,
            lineno=self.lineno,
        )


class CharacterStream:
    def __init__(self, text: str):
        self.text: str = text
        self.position: int = 0
        self.lineno: int = 1

    def get_char(self, *, offset: int = 0) -> Optional[str]:
        """Get the current character or return None"""
        if self.position + offset >= len(self.text):
            return None
        return self.text[self.position + offset]
