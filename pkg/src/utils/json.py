import os
import json
from typing import Any

from src.errors import ParseError
from src.log.system_logger import Logger, get_system_logger

LOG: Logger = get_system_logger(__name__)


def load_json(file_path: str) -> Any:
    """
    Loads a JSON document from disk.

    A missing or malformed file is an error; it never loads as empty.

    Args:
        file_path (str): The full path to the JSON file to be loaded.

    Returns:
        Any: The decoded document.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: If the file is not valid JSON (carries the line number).
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"The file '{file_path}' does not exist.")
    with open(file_path, 'r', encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, path=file_path, line=e.lineno) from e
    LOG.debug(f"Loaded JSON document from '{file_path}'.")
    return data


def dumps_json(data: Any, indent: int = 2) -> str:
    """
    Serializes data deterministically (sorted keys, fixed separators).

    Args:
        data (Any): A JSON-serializable object.
        indent (int): Indentation width; 0 produces a single line.

    Returns:
        str: The JSON text.
    """
    if indent:
        return json.dumps(data, indent=indent, sort_keys=True, ensure_ascii=False)
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def save_json(file_path: str, data: Any, indent: int = 2) -> None:
    """
    Saves data to a JSON file, ensuring the directory exists beforehand.

    Args:
        file_path (str): The full path to the JSON file where the data will be saved.
        data (Any): A JSON-serializable object.
        indent (int): Indentation width; 0 produces compact output.
    """
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(dumps_json(data, indent=indent))
        f.write("\n")
    LOG.debug(f"Saved JSON document to '{file_path}'.")
