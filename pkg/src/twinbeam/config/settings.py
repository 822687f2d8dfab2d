import os


def _parse_csv_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_int_list(value: str) -> list[int]:
    return [int(item) for item in _parse_csv_list(value)]


DEFAULT_SCENE_FILE = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "scenes",
    "default.yaml",
)


class Config:
    def __init__(self):
        self.output_directory = os.getenv("TWINBEAM_OUTPUT_DIR", "runs")
        self.workers = int(os.getenv("TWINBEAM_WORKERS", "1"))
        self.log_level = os.getenv("TWINBEAM_LOG_LEVEL", "INFO").upper()
        # Unset keeps the experiment's scene, or the packaged default
        self.scene_file = os.getenv("TWINBEAM_SCENE_FILE")

        # Quick mode (CI) runs a single short seed list
        self.quick_seeds = _parse_int_list(os.getenv("TWINBEAM_QUICK_SEEDS", "0"))
        self.quick_steps = int(os.getenv("TWINBEAM_QUICK_STEPS", "20"))

        # Structured run events, written next to the run outputs
        self.event_log_name = os.getenv("TWINBEAM_EVENT_LOG", "events.jsonl")


config = Config()
