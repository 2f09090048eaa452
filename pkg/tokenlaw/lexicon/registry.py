"""Language registry: which specification handles which files."""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, Field, PrivateAttr

from ..config import DEFAULT_REGISTRY_PATH, ERROR_MESSAGES, LANGUAGE_SPEC_DIR
from ..errors import ConfigError, LanguageSpecError
from .spec import LanguageSpec, load_language_spec

logger = logging.getLogger(__name__)


class LanguageEntry(BaseModel):
    """A single language in the registry."""
    name: str = Field(..., description="Language name")
    spec: str = Field(..., description="Specification file, relative to the spec directory")
    extensions: List[str] = Field(default_factory=list, description="File extensions, lower case with dot")
    best_effort: bool = Field(default=False, description="Component rules are approximate")
    notes: Optional[str] = Field(None, description="Additional notes")


class LanguageRegistry(BaseModel):
    """Registry of bundled and user languages."""
    name: str = Field(..., description="Registry name")
    version: str = Field(default="1.0", description="Registry version")
    spec_dir: str = Field(default=str(LANGUAGE_SPEC_DIR), description="Directory holding .lang files")
    languages: Dict[str, LanguageEntry] = Field(default_factory=dict, description="Languages by name")

    _specs: Dict[str, LanguageSpec] = PrivateAttr(default_factory=dict)

    def extension_map(self) -> Dict[str, str]:
        mapping: Dict[str, str] = {}
        for entry in self.languages.values():
            for extension in entry.extensions:
                mapping[extension.lower()] = entry.name
        return mapping

    def language_for(self, path: Union[str, Path]) -> Optional[str]:
        """Language name for a file by extension, or None when unknown."""
        return self.extension_map().get(Path(path).suffix.lower())

    def entry(self, language: str) -> LanguageEntry:
        for name, entry in self.languages.items():
            if name.lower() == language.lower():
                return entry
        raise ConfigError(ERROR_MESSAGES["unknown_language"].format(language=language))

    def load_spec(self, language: str) -> LanguageSpec:
        """Load (once) the specification of a registered language."""
        entry = self.entry(language)
        if entry.name not in self._specs:
            self._specs[entry.name] = load_language_spec(Path(self.spec_dir) / entry.spec)
        return self._specs[entry.name]


def load_registry(registry_path: Union[str, Path, None] = None) -> LanguageRegistry:
    """Load the language registry from a YAML file.

    Args:
        registry_path: Path to the registry YAML file; the bundled one by default

    Returns:
        Loaded registry

    Raises:
        ConfigError: If the file is missing or is not a valid registry
    """
    path = Path(registry_path) if registry_path is not None else DEFAULT_REGISTRY_PATH
    if not path.exists():
        raise ConfigError(ERROR_MESSAGES["file_not_found"].format(file=path))

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(ERROR_MESSAGES["invalid_yaml"].format(file=path, error=e)) from e

    spec_dir = Path(data.get("spec_dir", LANGUAGE_SPEC_DIR))
    if not spec_dir.is_absolute():
        spec_dir = path.parent / spec_dir

    registry = LanguageRegistry(
        name=data.get("name", "default"),
        version=str(data.get("version", "1.0")),
        spec_dir=str(spec_dir),
    )
    for name, entry_data in (data.get("languages") or {}).items():
        if not isinstance(entry_data, dict):
            raise ConfigError(f"Registry entry '{name}' in {path} must be a mapping")
        try:
            registry.languages[name] = LanguageEntry(name=name, **entry_data)
        except ValueError as e:
            raise ConfigError(f"Invalid registry entry '{name}' in {path}: {e}") from e

    logger.info(f"Loaded registry '{registry.name}' with {len(registry.languages)} languages")
    return registry


def load_bundled_spec(language: str) -> LanguageSpec:
    """Specification of a bundled language by name, e.g. ``"C"``."""
    try:
        return load_registry().load_spec(language)
    except ConfigError as e:
        raise LanguageSpecError(str(e)) from e
