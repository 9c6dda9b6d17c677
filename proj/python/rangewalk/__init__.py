"""Random walk on the range of a random walk in Z^d."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_pipeline_json, verify_json


def run_pipeline(config_text="", output_dir="rangewalk-out", cache_dir=""):
    """Run the full pipeline and return the manifest as a dict."""
    return json.loads(run_pipeline_json(config_text, output_dir, cache_dir))


def verify(config_text=""):
    """Oracle and invariant checks as a dict."""
    return json.loads(verify_json(config_text))
