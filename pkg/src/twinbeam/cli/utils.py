import functools
import json
import os
import sys

import click

from twinbeam.errors import (
    ArtifactError,
    ConfigHashMismatchError,
    SweepFailedError,
    TrainingDivergedError,
    UntrainedModelError,
)

# Errors reported as JSON on stderr with exit status 1
KNOWN_ERRORS = (
    ArtifactError,
    ConfigHashMismatchError,
    SweepFailedError,
    TrainingDivergedError,
    UntrainedModelError,
    FileNotFoundError,
    KeyError,
    ValueError,
)


class SeedList(click.ParamType):
    """Seeds as a comma list or an inclusive range, e.g. ``0,3,7`` or ``0-19``."""

    name = "seeds"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        seeds = []
        try:
            for part in str(value).split(","):
                part = part.strip()
                if not part:
                    continue
                if "-" in part:
                    start, stop = part.split("-", 1)
                    seeds.extend(range(int(start), int(stop) + 1))
                else:
                    seeds.append(int(part))
        except ValueError:
            self.fail(f"{value!r} is not a seed list", param, ctx)
        if not seeds:
            self.fail("empty seed list", param, ctx)
        return seeds


SEEDS = SeedList()


def flatten(groups):
    """Merges the lists of a multiple=True SeedList option."""
    merged = []
    for group in groups or ():
        merged.extend(group)
    return merged


def resolve_config_path(explicit):
    if explicit:
        return explicit
    if os.path.exists("twinbeam.yaml"):
        return "twinbeam.yaml"
    user_config = os.path.expanduser("~/.config/twinbeam/config.yaml")
    if os.path.exists(user_config):
        return user_config
    return None


def report_error(exc: BaseException) -> None:
    message = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
    click.echo(json.dumps({"error": type(exc).__name__, "message": message}), err=True)


def cli_errors(func):
    """Turns known failures into a JSON error on stderr and exit status 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except KNOWN_ERRORS as exc:
            report_error(exc)
            sys.exit(1)

    return wrapper
