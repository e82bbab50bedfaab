"""JSON schema validation for emitted reports."""
import json
import os
from typing import Any, Dict, List, Optional

import jsonschema

from src.core.errors import ConfigError

SCHEMA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "schema")


class ReportValidator:
    """Validate report documents against one of the bundled schemas."""

    def __init__(self, schema_name: Optional[str] = None, schema_path: Optional[str] = None):
        """Load ``<schema_name>.schema.json`` from the schema directory, or an explicit path."""
        if schema_path is None:
            if schema_name is None:
                raise ConfigError("ReportValidator needs a schema name or path")
            schema_path = os.path.join(SCHEMA_DIR, f"{schema_name}.schema.json")
        self.schema = self._load_schema(schema_path)
        self._validator = jsonschema.Draft7Validator(self.schema)

    def _load_schema(self, schema_path: str) -> Dict[str, Any]:
        try:
            with open(schema_path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot load report schema {schema_path}: {e}") from e

    def errors(self, document: Any) -> List[str]:
        """Every schema violation, as 'path: message' strings."""
        found = []
        for error in sorted(self._validator.iter_errors(document), key=lambda e: list(e.absolute_path)):
            where = "/".join(str(p) for p in error.absolute_path) or "<root>"
            found.append(f"{where}: {error.message}")
        return found

    def process(self, json_string: str) -> Dict[str, Any]:
        """
        Parse and validate a JSON report.

        Args:
            json_string: Serialised report

        Returns:
            Dict with the parsed document, validation status and errors
        """
        try:
            parsed = json.loads(json_string)
        except json.JSONDecodeError as e:
            return {"valid": False, "data": None, "errors": [f"JSON decode error: {e}"]}
        errors = self.errors(parsed)
        return {"valid": not errors, "data": parsed, "errors": errors}
