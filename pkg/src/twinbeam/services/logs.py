import json
import logging
import os
import threading
from datetime import datetime, timezone
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class EventLog:
    """Structured run events appended as JSON lines.

    With no path, or if the file cannot be written, events go to the
    standard logger instead.
    """

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self._lock = threading.Lock()

    def info(self, actor: str, action: str, message: str, metadata: Optional[Dict[str, Any]] = None, module: Optional[str] = None):
        """Record an info event."""
        self._log("info", actor, action, message, metadata, module)

    def error(self, actor: str, action: str, message: str, error_details: Optional[str] = None, metadata: Optional[Dict[str, Any]] = None, module: Optional[str] = None):
        """Record an error event."""
        if metadata is None:
            metadata = {}
        if error_details:
            metadata['error'] = error_details

        self._log("error", actor, action, message, metadata, module)

    def warning(self, actor: str, action: str, message: str, metadata: Optional[Dict[str, Any]] = None, module: Optional[str] = None):
        """Record a warning event."""
        self._log("warning", actor, action, message, metadata, module)

    def _log(self, level: str, actor: str, action: str, message: str, metadata: Optional[Dict[str, Any]], module: Optional[str]):
        record = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": level,
            "actor": actor,
            "action": action,
            "module": module,
            "message": message,
            "metadata": metadata or {},
        }
        if self.path is None:
            self._fallback(level, record)
            return
        try:
            line = json.dumps(record, default=str)
            with self._lock:
                directory = os.path.dirname(self.path)
                if directory:
                    os.makedirs(directory, exist_ok=True)
                with open(self.path, "a") as f:
                    f.write(line + "\n")
        except (OSError, TypeError, ValueError) as e:
            logger.warning("Failed to write event to %s: %s", self.path, e)
            self._fallback(level, record)

    @staticmethod
    def _fallback(level: str, record: Dict[str, Any]):
        log = getattr(logger, level, logger.info)
        log("%s/%s: %s %s", record["actor"], record["action"], record["message"], record["metadata"])
