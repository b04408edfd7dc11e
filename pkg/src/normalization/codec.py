"""Matrix codec and canonical JSON rendering.

This module converts between the JSON matrix encoding (a list of rows,
each entry an ``[re, im]`` pair) and complex numpy arrays, and renders
reports and artifacts as canonical JSON.
"""

import json
import logging
import math
from typing import Any, List

import numpy as np
from pydantic import BaseModel

from ..config import Config
from ..errors import ParseError


class MatrixCodec:
    """
    Encodes and decodes complex matrices for the file formats.

    Handles:
    - ``[re, im]`` pair decoding with JSON-path error messages
    - Recursive conversion of models and numpy values to JSON types
    - Canonical JSON (sorted keys, fixed precision, final newline)
    """

    def __init__(self, digits: int = Config.FLOAT_DIGITS, indent: int = Config.JSON_INDENT):
        """
        Initialize the codec.

        Args:
            digits: Significant digits kept for floats
            indent: JSON indentation
        """
        self.digits = digits
        self.indent = indent
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    @staticmethod
    def _number(value: Any, path: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ParseError(f"{path}: expected a number, got {type(value).__name__}",
                             {'path': path})
        if not math.isfinite(value):
            raise ParseError(f"{path}: non-finite number", {'path': path})
        return float(value)

    def decode_entry(self, raw: Any, path: str) -> complex:
        """Decode one ``[re, im]`` pair."""
        if not isinstance(raw, list) or len(raw) != 2:
            raise ParseError(f"{path}: expected an [re, im] pair", {'path': path})
        return complex(self._number(raw[0], f"{path}[0]"), self._number(raw[1], f"{path}[1]"))

    def decode_matrix(self, raw: Any, path: str) -> np.ndarray:
        """
        Decode a row-major matrix of ``[re, im]`` pairs.

        Args:
            raw: Parsed JSON value
            path: JSON path used in error messages

        Returns:
            Complex matrix

        Raises:
            ParseError: If the value is not a rectangular matrix of pairs
        """
        if not isinstance(raw, list) or not raw:
            raise ParseError(f"{path}: expected a non-empty list of rows", {'path': path})
        rows = []
        for i, row in enumerate(raw):
            if not isinstance(row, list) or not row:
                raise ParseError(f"{path}[{i}]: expected a non-empty row", {'path': f"{path}[{i}]"})
            rows.append([self.decode_entry(entry, f"{path}[{i}][{j}]") for j, entry in enumerate(row)])
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                raise ParseError(
                    f"{path}[{i}]: row has {len(row)} entries, expected {width}",
                    {'path': f"{path}[{i}]"},
                )
        return np.array(rows, dtype=np.complex128)

    def decode_matrix_list(self, raw: Any, path: str) -> List[np.ndarray]:
        if not isinstance(raw, list):
            raise ParseError(f"{path}: expected a list of matrices", {'path': path})
        return [self.decode_matrix(item, f"{path}[{k}]") for k, item in enumerate(raw)]

    def decode_real_vector(self, raw: Any, path: str) -> np.ndarray:
        if not isinstance(raw, list) or not raw:
            raise ParseError(f"{path}: expected a non-empty list of numbers", {'path': path})
        return np.array([self._number(x, f"{path}[{i}]") for i, x in enumerate(raw)])

    def _float(self, x: float):
        if not math.isfinite(x):
            return None
        return float(f"{x:.{self.digits}g}")

    def encode_matrix(self, a: np.ndarray) -> List[List[List[float]]]:
        """Complex matrix as rows of ``[re, im]`` pairs."""
        return [[[self._float(z.real), self._float(z.imag)] for z in row] for row in np.asarray(a)]

    def to_jsonable(self, obj: Any) -> Any:
        """
        Convert models, numpy arrays and scalars into plain JSON values.

        Complex arrays are encoded entrywise as ``[re, im]`` pairs, real
        arrays as nested lists of floats, non-finite floats as ``None``.
        """
        if isinstance(obj, BaseModel):
            return self.to_jsonable(obj.model_dump())
        if isinstance(obj, dict):
            return {str(k): self.to_jsonable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self.to_jsonable(v) for v in obj]
        if isinstance(obj, np.ndarray):
            if np.iscomplexobj(obj):
                if obj.ndim == 0:
                    return self.to_jsonable(complex(obj))
                return [self.to_jsonable(v) for v in obj]
            return self.to_jsonable(obj.tolist())
        if isinstance(obj, (bool, np.bool_)):
            return bool(obj)
        if isinstance(obj, (int, np.integer)):
            return int(obj)
        if isinstance(obj, (float, np.floating)):
            return self._float(float(obj))
        if isinstance(obj, (complex, np.complexfloating)):
            return [self._float(obj.real), self._float(obj.imag)]
        return obj

    def dumps(self, obj: Any) -> str:
        """Canonical JSON text: sorted keys, fixed indent, final newline."""
        text = json.dumps(self.to_jsonable(obj), sort_keys=True, indent=self.indent,
                          ensure_ascii=False, allow_nan=False)
        return text + "\n"

    def channel_document(self, ch) -> dict:
        """Channel-file document for a Kraus, Holevo or weighted-Choi channel."""
        self.logger.debug(f"Encoding {ch.representation} channel {ch.dim_in}->{ch.dim_out}")
        doc = {'dim_in': ch.dim_in, 'dim_out': ch.dim_out, 'representation': ch.representation}
        if ch.representation == "kraus":
            doc['kraus'] = [self.encode_matrix(op) for op in ch.kraus]
        elif ch.representation == "holevo":
            doc['holevo'] = {
                'states': [self.encode_matrix(r) for r in ch.states],
                'effects': [self.encode_matrix(f) for f in ch.effects],
            }
        else:
            doc['choi'] = {
                'weights': [self._float(w) for w in ch.weights],
                'sigma': self.encode_matrix(ch.sigma),
            }
        return doc
