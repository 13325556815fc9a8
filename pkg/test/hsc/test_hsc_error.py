import pytest
from common import add_hsc_to_sys_path

add_hsc_to_sys_path()

from hsc.error import (
    HscError,
    HscFormatError,
    HscIOError,
    HscNumericalError,
    HscParseError,
    HscUsageError,
)
from hsc.meshio.hsc_parser import parse_off

BAD_FACE_OFF = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n"


def get_single_line_underlined_text(text: str):
    """
    NOTE    I assume the last line is the one that contains the underline."""
    errmsg, textmsg, underline = text.splitlines()
    # Strip the "> N | " gutter from both lines.
    gutter = textmsg.index("|") + 2
    return "".join(
        c for c, u in zip(textmsg[gutter:], underline[gutter:]) if u == "^"
    )


def test_underline_matches_text_of_interest():
    start = BAD_FACE_OFF.index("7")
    err = HscError(BAD_FACE_OFF, start, start + 1, "face index out of range")
    assert get_single_line_underlined_text(err.error_string) == "7"
    assert err.get_text_of_interest() == "7"
    assert "> 6 | 3 0 1 7" in str(err)


def test_line_and_column_are_zero_based():
    text = "ab\ncd\n"
    assert HscError.get_line_and_column(text, 0) == (0, 0)
    assert HscError.get_line_and_column(text, 4) == (1, 1)
    # The newline belongs to the line it ends.
    assert HscError.get_line_and_column(text, 2) == (0, 2)


def test_parse_error_renders_offending_token():
    with pytest.raises(HscParseError) as info:
        parse_off(BAD_FACE_OFF)
    assert info.value.lineno == 6
    assert str(info.value).startswith("line 6:")
    assert get_single_line_underlined_text(info.value.rendered) == "7"


def test_exit_codes():
    assert HscUsageError.exit_code == 1
    assert HscIOError.exit_code == 2
    assert HscParseError.exit_code == 3
    assert HscFormatError.exit_code == 3
    assert HscNumericalError.exit_code == 4
    assert issubclass(HscUsageError, ValueError)
    assert issubclass(HscIOError, OSError)
    assert issubclass(HscNumericalError, ArithmeticError)


def main():
    start = BAD_FACE_OFF.index("7")
    err = HscError(BAD_FACE_OFF, start, start + 1, "face index out of range")
    print(err)
    test_underline_matches_text_of_interest()
    test_line_and_column_are_zero_based()
    test_parse_error_renders_offending_token()
    test_exit_codes()


if __name__ == "__main__":
    main()
