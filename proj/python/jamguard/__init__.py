"""Python bindings for the jamguard jamming-detection pipeline."""

import json
import os

from . import _core
from ._core import (
    ConfigError,
    DomainError,
    JamguardError,
    ParseError,
    SchemaError,
    StateError,
    efficiency_to_cqi,
    efficiency_to_mcs,
    roc_auc,
    snr_to_spectral_efficiency,
)

__version__ = _core.version

COMMANDS = ("gen", "train", "eval", "bnm", "correct", "bench", "report", "all")


def default_config():
    """Default pipeline configuration as a dict."""
    return json.loads(_core.default_config_json())


def _dump(config):
    return "" if config is None else json.dumps(config)


def config_hash(config=None):
    return _core.config_hash(_dump(config if config is not None else default_config()))


def generate(config=None):
    """Labelled dataset as a dict with ``features`` (n x 34), ``labels``, ``scenario_id`` and ``columns``."""
    return _core.generate(_dump(config))


def rules_network():
    """Untrained rule DAG (uniform CPTs) as a dict."""
    return json.loads(_core.rules_network_json())


def jamming_posterior(network, evidence):
    """Pr(jamming | evidence). ``network`` is a network dict or a bnm.json document."""
    if "network" in network:
        network = network["network"]
    return _core.jamming_posterior(json.dumps(network), json.dumps(evidence))


def run(command, out_dir, config=None, evidence_path=None, force=False, quiet=True):
    """Run one CLI subcommand in-process, writing artifacts below ``out_dir``."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    return _core.run_command(command, _dump(config), os.fspath(out_dir), evidence_path, force, quiet)


__all__ = [
    "COMMANDS",
    "ConfigError",
    "DomainError",
    "JamguardError",
    "ParseError",
    "SchemaError",
    "StateError",
    "config_hash",
    "default_config",
    "efficiency_to_cqi",
    "efficiency_to_mcs",
    "generate",
    "jamming_posterior",
    "roc_auc",
    "rules_network",
    "run",
    "snr_to_spectral_efficiency",
]
