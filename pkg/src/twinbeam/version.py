import os
import subprocess

# This variable is intended to be overwritten during the build/release process
__version__ = "0.1.0+dev"


def get_version() -> str:
    """
    Returns the version recorded in dataset manifests and model artifacts.
    Priorities:
    1. Explicitly set __version__ (if not a dev build)
    2. Dev build suffixed with the git commit hash (if inside a git repo)
    3. Fallback dev version
    """
    if not __version__.endswith("+dev"):
        return __version__

    try:
        cmd = ["git", "rev-parse", "--short", "HEAD"]
        result = subprocess.run(
            cmd,
            capture_output=True,
            text=True,
            check=True,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        return __version__.replace("+dev", "+" + result.stdout.strip())
    except (subprocess.CalledProcessError, FileNotFoundError, OSError):
        pass

    return __version__
