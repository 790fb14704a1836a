"""
Configuration merger that handles precedence rules for CLI overrides.

Precedence order (highest to lowest):
1. CLI flags
2. Environment variables
3. Configuration file values
4. Built-in defaults

Levels 2-4 are resolved by ``get_config_from_env``; this module layers the
CLI flags on top.
"""

import logging
from typing import Any, Dict, Optional, Tuple

from flightplay.config import FlightPlayConfig, build_config

logger = logging.getLogger(__name__)

# CLI flag name -> (config section, config key)
CLI_TO_CONFIG = {
    'fps': ('playback', 'fps'),
    'rate': ('playback', 'rate'),
    'samples_per_segment': ('interpolation', 'samples_per_segment'),
    'degree': ('interpolation', 'degree'),
    'log_level': ('logging', 'level'),
    'log_format': ('logging', 'format'),
    'max_workers': ('ingest', 'max_workers'),
}


class ConfigMerger:
    """Applies CLI overrides to a loaded configuration"""

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    def build_effective_config(
        self,
        base_config: FlightPlayConfig,
        cli_args: Optional[Dict[str, Any]] = None,
    ) -> FlightPlayConfig:
        """
        Build effective configuration with proper precedence.

        Args:
            base_config: Configuration from file and environment
            cli_args: CLI flag values keyed by flag name; None values are ignored

        Returns:
            New validated configuration; the base is not modified
        """
        effective = base_config.model_dump()
        overrides_applied = []

        for flag, value in self.args_to_dict(cli_args or {}).items():
            target = self._map_cli_to_config_key(flag)
            if target is None:
                continue
            section, key = target
            old_value = effective[section].get(key)
            effective[section][key] = value
            overrides_applied.append(f"CLI: {section}.{key}={value} (was: {old_value})")

        if overrides_applied:
            self.logger.info(f"Configuration overrides applied: {', '.join(overrides_applied)}")
        else:
            self.logger.debug("No configuration overrides applied")

        return build_config(effective, source="command line")

    def args_to_dict(self, args) -> Dict[str, Any]:
        """
        Convert a namespace or mapping of CLI values to a dictionary,
        filtering out None values so unset flags never override config.
        """
        if hasattr(args, '__dict__') and not isinstance(args, dict):
            args_dict = vars(args)
        else:
            args_dict = dict(args)

        return {k: v for k, v in args_dict.items() if v is not None}

    def _map_cli_to_config_key(self, flag: str) -> Optional[Tuple[str, str]]:
        return CLI_TO_CONFIG.get(flag)
