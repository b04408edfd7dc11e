"""Input/Output handling utilities.

This module handles file I/O operations including:
- Reading channel, subspace and projection files
- Writing reports and channel artifacts as canonical JSON
- Input digests for reports
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pydantic

from ..config import Config
from ..errors import IoError, ParseError, ValidationError
from ..models.schema import (
    Channel,
    HolevoChannel,
    KrausChannel,
    SubspaceSpec,
    Tolerances,
    WeightedChoi,
)
from ..normalization.codec import MatrixCodec
from ..validation.validator import ChannelFileValidator

REPRESENTATIONS = ("kraus", "holevo", "choi")


class IOHandler:
    """
    Handles all file I/O operations for the toolkit.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None, codec: Optional[MatrixCodec] = None):
        """
        Initialize IO handler.

        Args:
            tolerances: Tolerances used when validating parsed channels
            codec: Matrix codec (default: canonical settings from Config)
        """
        self.codec = codec or MatrixCodec()
        self.validator = ChannelFileValidator(tolerances)
        self.logger = logging.getLogger(f"{Config.LOGGER_NAME}.{self.__class__.__name__}")

    def read_json(self, file_path: Path) -> Dict[str, Any]:
        """
        Read a JSON object from disk.

        Raises:
            IoError: If the file cannot be read
            ParseError: If the content is not a JSON object
        """
        file_path = Path(file_path)
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"Invalid JSON in {file_path}: {e}", {'path': "$"})
        except OSError as e:
            raise IoError(f"Cannot read {file_path}: {e.strerror or e}", {'file': str(file_path)})

        if not isinstance(data, dict):
            raise ParseError(f"{file_path}: top level must be a JSON object", {'path': "$"})
        self.logger.debug(f"Loaded JSON from {file_path}")
        return data

    @staticmethod
    def _dimension(data: Dict[str, Any], key: str) -> int:
        value = data.get(key)
        if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
            raise ParseError(f"{key}: expected a positive integer", {'path': key})
        return value

    @staticmethod
    def _model_error(e: pydantic.ValidationError, prefix: str) -> ParseError:
        first = e.errors()[0]
        loc = ".".join(str(part) for part in first.get('loc', ()))
        path = f"{prefix}.{loc}" if loc else prefix
        return ParseError(f"{path}: {first.get('msg')}", {'path': path})

    def parse_channel(self, data: Dict[str, Any]) -> Channel:
        """
        Build a channel model from a parsed channel-file document.

        Raises:
            ParseError: With the JSON path of the malformed field
        """
        dim_in = self._dimension(data, 'dim_in')
        dim_out = self._dimension(data, 'dim_out')
        tag = data.get('representation')
        if tag not in REPRESENTATIONS:
            raise ParseError(f"representation: expected one of {REPRESENTATIONS}, got {tag!r}",
                             {'path': "representation"})
        present = [key for key in REPRESENTATIONS if key in data]
        if present != [tag]:
            raise ParseError(
                f"{tag}: exactly one payload matching the tag is required, found {present}",
                {'path': tag},
            )

        payload = data[tag]
        try:
            if tag == "kraus":
                kraus = self.codec.decode_matrix_list(payload, "kraus")
                return KrausChannel(dim_in=dim_in, dim_out=dim_out, kraus=kraus)
            if not isinstance(payload, dict):
                raise ParseError(f"{tag}: expected an object", {'path': tag})
            if tag == "holevo":
                states = self.codec.decode_matrix_list(payload.get('states'), "holevo.states")
                effects = self.codec.decode_matrix_list(payload.get('effects'), "holevo.effects")
                return HolevoChannel(dim_in=dim_in, dim_out=dim_out, states=states, effects=effects)
            weights = self.codec.decode_real_vector(payload.get('weights'), "choi.weights")
            if weights.shape != (dim_in,) or np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
                raise ParseError(
                    f"choi.weights: expected {dim_in} positive weights summing to 1",
                    {'path': "choi.weights"},
                )
            sigma = self.codec.decode_matrix(payload.get('sigma'), "choi.sigma")
            return WeightedChoi(dim_in=dim_in, dim_out=dim_out, weights=weights, sigma=sigma)
        except pydantic.ValidationError as e:
            raise self._model_error(e, tag)

    def read_channel(self, file_path: Path, verify: bool = True) -> Channel:
        """
        Read and validate a channel file.

        Args:
            file_path: Path to the channel JSON file
            verify: Reject channels that fail the CPTP checks

        Returns:
            Parsed channel

        Raises:
            IoError: If the file cannot be read
            ParseError: If the file is malformed
            ValidationError: If verify is set and the channel is not CPTP
        """
        ch = self.parse_channel(self.read_json(file_path))
        self.logger.info(f"Loaded {ch.representation} channel {ch.dim_in}->{ch.dim_out} from {file_path}")
        if verify:
            result = self.validator.validate(ch)
            if not result.is_valid:
                raise ValidationError(
                    "; ".join(result.errors),
                    {'errors': result.errors, 'residuals': result.residuals},
                )
        return ch

    def read_subspace(self, file_path: Path) -> SubspaceSpec:
        """
        Read a subspace file ``{"dim": d, "generators": [...]}``.

        Raises:
            IoError: If the file cannot be read
            ParseError: If the file is malformed
            ValidationError: If a generator is not trace-zero or the span is not self-adjoint
        """
        data = self.read_json(file_path)
        dim = self._dimension(data, 'dim')
        generators = self.codec.decode_matrix_list(data.get('generators', []), "generators")
        try:
            spec = SubspaceSpec(dim=dim, generators=generators)
        except pydantic.ValidationError as e:
            raise self._model_error(e, "generators")

        result = self.validator.validate_subspace(spec)
        if not result.is_valid:
            raise ValidationError(
                "; ".join(result.errors),
                {'path': result.errors[0].split(":")[0], 'errors': result.errors},
            )
        return spec

    def read_projections(self, file_path: Path) -> Tuple[int, List[np.ndarray]]:
        """
        Read a projection file ``{"dim": d, "projections": [...]}``.

        A single ``"projection"`` entry is accepted as well.

        Raises:
            IoError: If the file cannot be read
            ParseError: If the file is malformed or a shape is wrong
        """
        data = self.read_json(file_path)
        dim = self._dimension(data, 'dim')
        if 'projection' in data:
            projections = [self.codec.decode_matrix(data['projection'], "projection")]
        else:
            projections = self.codec.decode_matrix_list(data.get('projections'), "projections")
        for k, p in enumerate(projections):
            if p.shape != (dim, dim):
                raise ParseError(f"projections[{k}]: shape {p.shape}, expected {(dim, dim)}",
                                 {'path': f"projections[{k}]"})
        return dim, projections

    def write_json(self, data: Any, output_path: Path):
        """
        Write data to a file as canonical JSON.

        Raises:
            IoError: If the file cannot be written
        """
        output_path = Path(output_path)
        try:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(output_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(self.codec.dumps(data))
        except OSError as e:
            raise IoError(f"Cannot write {output_path}: {e.strerror or e}", {'file': str(output_path)})
        self.logger.info(f"Wrote {output_path}")

    def write_channel(self, ch: Channel, output_path: Path):
        """Write a channel file that read_channel accepts."""
        self.write_json(self.codec.channel_document(ch), output_path)

    def digest(self, file_path: Path) -> str:
        """
        SHA-256 hex digest of a file's bytes.

        Raises:
            IoError: If the file cannot be read
        """
        file_path = Path(file_path)
        try:
            return hashlib.sha256(file_path.read_bytes()).hexdigest()
        except OSError as e:
            raise IoError(f"Cannot read {file_path}: {e.strerror or e}", {'file': str(file_path)})
