import os
import json
import yaml
from typing import Any, Dict

from src.errors import ParseError


def load_yaml(path: str) -> Any:
    """
    Loads and parses the content of a YAML file.

    Args:
        path (str): The full path to the YAML file.

    Returns:
        Any: The parsed content, usually a dictionary.

    Raises:
        TypeError: If the provided path is not a string.
        FileNotFoundError: If the file does not exist at the specified path.
        ParseError: If the file does not have a .yaml or .yml extension, or if there is a parsing error.
    """
    if not isinstance(path, str):
        raise TypeError("The 'path' argument must be a string.")
    if not os.path.exists(path):
        raise FileNotFoundError(f"The file '{path}' does not exist.")
    if not path.lower().endswith((".yaml", ".yml")):
        raise ParseError("The file must have a .yaml or .yml extension.", path=path)

    with open(path, "r", encoding="utf-8") as file:
        try:
            return yaml.safe_load(file)
        except yaml.YAMLError as e:
            line = None
            mark = getattr(e, "problem_mark", None)
            if mark is not None:
                line = mark.line + 1
            raise ParseError(f"Error parsing YAML: {e}", path=path, line=line) from e


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Loads a mapping from a JSON or YAML config file, chosen by extension.

    Args:
        path (str): Path to a .json, .yaml or .yml file.

    Returns:
        Dict[str, Any]: The top-level mapping (empty for an empty YAML file).

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: If the content is malformed or not a mapping.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"The file '{path}' does not exist.")

    if path.lower().endswith(".json"):
        with open(path, "r", encoding="utf-8") as file:
            try:
                content = json.load(file)
            except json.JSONDecodeError as e:
                raise ParseError(e.msg, path=path, line=e.lineno) from e
    else:
        content = load_yaml(path)

    if content is None:
        return {}
    if not isinstance(content, dict):
        raise ParseError("Top level must be a mapping.", path=path)
    return content
