from pathlib import Path


class HscError:
    """Render a message with the offending input line underlined. The mesh
    parsers point at the exact token that broke the file, with a 1-based
    line number."""

    def __init__(
        self,
        input_: Path | str,
        start_position: int,
        end_position: int,
        message: str,
    ):
        self.error_string = HscError.create_error_string(
            input_, start_position, end_position, message
        )

        self.input_ = input_
        self.start_position = start_position
        self.end_position = end_position
        self.message = message

    def __str__(self) -> str:
        return self.error_string

    def __repr__(self) -> str:
        return self.error_string

    def get_text_of_interest(self) -> str:
        """
        @brief  Return the text that we intended to highlight.

        @note   The intention of this function is for debugging.
        """
        text = HscError._read_text(self.input_)
        return text[self.start_position : self.end_position]

    @staticmethod
    def _read_text(input_: Path | str) -> str:
        if isinstance(input_, Path):
            with input_.open() as f:
                return f.read()
        return input_

    @staticmethod
    def get_line_and_column(text: str, position: int) -> tuple[int, int]:
        """
        @note   I index from zero. A new line character ends its line, so a
                position sitting on '\\n' belongs to the line it terminates.
        """
        if not len(text):
            return 0, 0
        lineno = text.count("\n", 0, position)
        line_start = text.rfind("\n", 0, position) + 1
        return lineno, position - line_start

    @staticmethod
    def create_single_line_error_string(
        input_text: str, lineno: int, start_col: int, end_col: int, message: str
    ) -> str:
        """Create an error string for an error that spans a single line."""
        text_lines: list[str] = input_text.splitlines() or [""]
        line = text_lines[lineno] if lineno < len(text_lines) else ""
        user_line = lineno + 1
        width = max(end_col - start_col, 1)
        return (
            f"> Error: {message}\n"
            f"> {user_line} | {line}\n"
            f"> {' ' * len(str(user_line))} | {' ' * start_col}{'^' * width}\n"
        )

    @staticmethod
    def create_error_string(
        input_: Path | str,
        start_position: int,
        end_position: int,
        message: str,
    ) -> str:
        """
        @brief  Create a string with the error underlined and the error message
                displayed.

        @param  start_position: int
                    The very first character that should be highlighted.
        @param  end_position: int
                    One past the last character that should be highlighted.

        @example
        > Error: face index 7 out of range [0, 3)
        > 6 | 3 0 1 7
        >   |       ^
        """
        input_text = HscError._read_text(input_)
        end_position = max(end_position, start_position + 1)
        start_line, start_col = HscError.get_line_and_column(
            input_text, start_position
        )
        end_line, end_col = HscError.get_line_and_column(
            input_text, end_position
        )
        if start_line != end_line:
            # Only the first line of a multi-line span is shown.
            line_length = len((input_text.splitlines() or [""])[start_line])
            end_col = max(line_length, start_col + 1)
        return HscError.create_single_line_error_string(
            input_text, start_line, start_col, end_col, message
        )


################################################################################
### EXCEPTIONS
################################################################################


class HscException(Exception):
    """Root of every error the library raises. `exit_code` is what the
    command line returns for this class of failure."""

    exit_code: int = 1


class HscUsageError(HscException, ValueError):
    exit_code = 1


class HscIOError(HscException, OSError):
    exit_code = 2


class HscParseError(HscException, ValueError):
    exit_code = 3

    def __init__(self, message: str, *, lineno: int, rendered: str = ""):
        super().__init__(f"line {lineno}: {message}")
        self.message = message
        self.lineno = lineno
        self.rendered = rendered


class HscFormatError(HscException, ValueError):
    exit_code = 3


class HscConnectivityError(HscException, ValueError):
    exit_code = 3


class HscNumericalError(HscException, ArithmeticError):
    exit_code = 4
