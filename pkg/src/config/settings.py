"""
Application settings for symfinsler.
"""

import copy
import logging
import os

import yaml

from errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS = {
    'logging': {
        'level': 'INFO',
    },
    'oracle': {
        'directions_2d': 720,
        'directions_3d': 2000,
        'seed': 20240611,
        'margin': 1e-6,   # relative to 1 + |l| + |m| + |n|
        'fd_step': 1e-4,
    },
    'tolerances': {
        'critical_snap': 1e-9,
        'singular_eps': 1e-8,
        'curvature': 1e-6,
        'energy_relation': 1e-5,
    },
    'table': {
        'decimals': 2,
        'l_values': [1, 2, 3, 4],
        'm_values': list(range(12)),
    },
    'reports': {
        'archive_dir': None,  # No archiving if None
        'keep_latest': True,
    },
    'witness': {
        'coarse_directions': 360,
    },
}


def default_settings_paths():
    """Settings files searched when no explicit path is given, in order."""
    return [
        os.path.expanduser('~/.symfinsler/config.yaml'),
        os.path.join(os.path.dirname(__file__), '..', '..', 'config.yaml'),
    ]


def load_settings(settings_path=None):
    """
    Load settings from a YAML file.

    Args:
        settings_path (str, optional): Path to the settings file.
            If None, looks for config.yaml in ~/.symfinsler and the
            repository directory.

    Returns:
        dict: Default settings merged with values from the first file found.

    Raises:
        ConfigError: An explicit settings file is missing or malformed.
    """
    settings = copy.deepcopy(DEFAULT_SETTINGS)

    if settings_path is not None and not os.path.exists(settings_path):
        raise ConfigError(f"Settings file not found: {settings_path}")
    potential_paths = default_settings_paths() if settings_path is None else [settings_path]

    for path in potential_paths:
        if os.path.exists(path):
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    user_settings = yaml.safe_load(f)
            except yaml.YAMLError as e:
                if settings_path is not None:
                    raise ConfigError(f"Malformed settings file {path}: {e}") from e
                logger.warning(f"Failed to load settings from {path}: {e}")
                continue
            if user_settings:
                if not isinstance(user_settings, dict):
                    raise ConfigError(f"Settings file {path} must contain a mapping")
                _deep_update(settings, user_settings)
            logger.info(f"Loaded settings from {path}")
            break

    return settings


def _deep_update(d, u):
    """
    Recursively update a dictionary with another dictionary.

    Args:
        d (dict): Dictionary to update
        u (dict): Dictionary with updates

    Returns:
        dict: Updated dictionary
    """
    for k, v in u.items():
        if isinstance(v, dict) and k in d and isinstance(d[k], dict):
            _deep_update(d[k], v)
        else:
            d[k] = v
    return d


def logging_level(settings):
    """Numeric logging level from settings['logging']['level'], INFO when unknown."""
    return getattr(logging, str(settings.get('logging', {}).get('level', 'INFO')).upper(), logging.INFO)
