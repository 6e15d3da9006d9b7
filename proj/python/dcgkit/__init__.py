"""Label-shift preprocessing for linear feature reduction, with PCA/SRDA and k-NN evaluation."""

import json
from pathlib import Path

from ._dcgkit import *  # noqa: F401,F403
from ._dcgkit import __version__, load_config_text, run_comparison_json


def run_comparison(config, overrides=None, data=None):
    """Run a baseline vs shifted comparison and return the report as a dict.

    `config` is a path to a config file or the config text itself.
    """
    if isinstance(config, Path) or (isinstance(config, str) and "\n" not in config and Path(config).is_file()):
        text = load_config_text(str(config))
    else:
        text = config
    overrides = {k: str(v) for k, v in (overrides or {}).items()}
    return json.loads(run_comparison_json(text, overrides, data))
