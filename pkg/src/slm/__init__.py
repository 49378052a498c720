"""Static analysis and restructuring of block-diagram models as modules."""

from slm.errors import SlmError
from slm.interface import extract_interface, render_interface_text
from slm.model import Block, BlockKind, BlockPath, ModelFile, System
from slm.parser import load_dictionary, load_model, read_model, serialize_model

__all__ = [
    "Block",
    "BlockKind",
    "BlockPath",
    "ModelFile",
    "SlmError",
    "System",
    "extract_interface",
    "load_dictionary",
    "load_model",
    "read_model",
    "render_interface_text",
    "serialize_model",
]
