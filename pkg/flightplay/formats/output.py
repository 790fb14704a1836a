"""
Writing generated text files.
"""

from pathlib import Path
from typing import Union

from flightplay.exceptions import OutputError


def write_text_file(path: Union[str, Path], text: str) -> Path:
    """
    Write UTF-8 text with LF line endings.

    Raises:
        OutputError: If the file cannot be written; names the path
    """
    path = Path(path)
    try:
        path.write_text(text, encoding='utf-8', newline='\n')
    except OSError as e:
        raise OutputError(f"Cannot write {path}: {e.strerror or e}", str(path)) from e
    return path
