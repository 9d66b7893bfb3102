# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Plain-text run configuration: one `key = value` per line, `#` starts a comment.

Keys are the RunConfig field names plus `out_dir`. Values are coerced to the field's
declared type. Precedence is defaults < file < REACH_SEED < command-line overrides.
"""
import logging
import os
from dataclasses import fields
from typing import Dict, Iterable, Mapping, Optional, Tuple

from reachgoal.exceptions import ConfigError
from reachgoal.orchestrator.config import RunConfig
from reachgoal.settings import SEED_ENV_VAR

logger = logging.getLogger(__file__)

OUT_DIR_KEY = "out_dir"
TRUE_WORDS = ("true", "1", "yes")
FALSE_WORDS = ("false", "0", "no")
FIELD_TYPES = {item.name: item.type for item in fields(RunConfig)}


def coerce_value(key: str, raw: str, line: Optional[int] = None):
    """
    Convert the text of a value to the type of its field.

    Raises:
        ConfigError: for unknown keys and values of the wrong type
    """
    if key == OUT_DIR_KEY:
        field_type = str
    elif key in FIELD_TYPES:
        field_type = FIELD_TYPES[key]
    else:
        raise ConfigError(f"unknown key '{key}'", line, key)
    raw = raw.strip()
    if not raw:
        raise ConfigError(f"missing value for '{key}'", line, key)

    if field_type is bool:
        if raw.lower() in TRUE_WORDS:
            return True
        if raw.lower() in FALSE_WORDS:
            return False
        raise ConfigError(f"'{key}' expects true or false, got '{raw}'", line, key)
    if field_type is int:
        try:
            return int(raw)
        except ValueError:
            pass
        try:
            number = float(raw)
        except ValueError as err:
            raise ConfigError(f"'{key}' expects an integer, got '{raw}'", line, key) from err
        if not number.is_integer():
            raise ConfigError(f"'{key}' expects an integer, got '{raw}'", line, key)
        return int(number)
    if field_type is float:
        try:
            return float(raw)
        except ValueError as err:
            raise ConfigError(f"'{key}' expects a number, got '{raw}'", line, key) from err
    return raw


def parse_config_values(text: str) -> Dict[str, object]:
    """
    Parse config text into typed values.

    Returns:
        Only the keys present in the text

    Raises:
        ConfigError: carrying the line number of the first bad line
    """
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError(f"expected 'key = value', got '{content}'", number)
        key, raw = (part.strip() for part in content.split("=", 1))
        if key in values:
            raise ConfigError(f"duplicate key '{key}'", number, key)
        values[key] = coerce_value(key, raw, number)
    return values


def parse_overrides(overrides: Iterable[str]) -> Dict[str, object]:
    """Typed values of `key=value` command-line arguments; errors name the argument position"""
    values = {}
    for position, override in enumerate(overrides, start=1):
        override = str(override)
        if "=" not in override:
            raise ConfigError(f"argument {position}: expected key=value, got '{override}'")
        key, raw = (part.strip() for part in override.split("=", 1))
        try:
            values[key] = coerce_value(key, raw)
        except ConfigError as err:
            raise ConfigError(f"argument {position}: {err}", key=key) from err
    return values


def build_config(values: Mapping[str, object]) -> Tuple[RunConfig, Optional[str]]:
    """RunConfig and out_dir from typed values; the result is validated"""
    values = dict(values)
    out_dir = values.pop(OUT_DIR_KEY, None)
    try:
        config = RunConfig(**values).validate()
    except ValueError as err:
        raise ConfigError(str(err)) from err
    return config, out_dir


def parse_config(text: str) -> Tuple[RunConfig, Optional[str]]:
    """
    Parse config text on top of the RunConfig defaults.

    Args:
        text: The file contents

    Returns:
        The validated config and the out_dir, if the text names one
    """
    return build_config(parse_config_values(text))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_config(config: RunConfig, out_dir: Optional[str] = None) -> str:
    """Every field in declaration order; parse_config of the result gives back an equal config"""
    lines = ["# reachgoal run configuration"]
    lines.extend(f"{item.name} = {_format_value(getattr(config, item.name))}" for item in fields(RunConfig))
    if out_dir is not None:
        lines.append(f"{OUT_DIR_KEY} = {out_dir}")
    return "\n".join(lines) + "\n"


def load_config(path: str,
                overrides: Iterable[str] = (),
                environ: Optional[Mapping[str, str]] = None) -> Tuple[RunConfig, Optional[str]]:
    """
    Read a config file and apply the seed environment variable and command-line overrides.

    Args:
        path: The config file
        overrides: `key=value` strings, applied last
        environ: Environment variables, os.environ by default

    Returns:
        The validated config and the out_dir

    Raises:
        ConfigError: for unreadable files and any invalid line, value or override
    """
    environ = os.environ if environ is None else environ
    try:
        with open(path, encoding="utf-8") as config_file:
            values = parse_config_values(config_file.read())
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from err
    if environ.get(SEED_ENV_VAR):
        try:
            values["seed"] = coerce_value("seed", environ[SEED_ENV_VAR])
        except ConfigError as err:
            raise ConfigError(f"{SEED_ENV_VAR}: {err}", key="seed") from err
    values.update(parse_overrides(overrides))
    config, out_dir = build_config(values)
    logger.info("Loaded config %s with seed %d", path, config.seed)
    return config, out_dir
