"""Export manifests and the cross-session subject filter."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Tuple


@dataclass
class ExportManifest:
    """Record of one export run.

    ``sessions_per_subject`` maps subject id -> session names exported.
    ``event_window_s`` is the (start, stop) epoch window relative to the
    cue, in seconds, as used by the paradigm loader.
    """

    dataset_name: str
    paradigm: str  # "left_right" | "motor_imagery"
    fs: float
    channels: List[str]
    event_window_s: Tuple[float, float]
    sessions_per_subject: Dict[str, List[str]] = field(default_factory=dict)

    @property
    def subjects(self) -> List[str]:
        return sorted(self.sessions_per_subject)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExportManifest":
        d = json.loads(text)
        d["event_window_s"] = tuple(d["event_window_s"])
        return cls(**d)


def cross_session_manifest(manifest: ExportManifest) -> ExportManifest:
    """Restrict a manifest to subjects with at least two sessions.

    Subjects with fewer sessions cannot take part in cross-session
    evaluation; they are dropped with a warning.
    """
    kept, dropped = {}, []
    for subject, sessions in manifest.sessions_per_subject.items():
        if len(set(sessions)) >= 2:
            kept[subject] = list(sessions)
        else:
            dropped.append(subject)
    if dropped:
        warnings.warn(
            f"{manifest.dataset_name}: excluded single-session subjects "
            f"{sorted(dropped)} from the cross-session manifest",
            stacklevel=2,
        )
    return ExportManifest(
        dataset_name=manifest.dataset_name,
        paradigm=manifest.paradigm,
        fs=manifest.fs,
        channels=list(manifest.channels),
        event_window_s=tuple(manifest.event_window_s),
        sessions_per_subject=kept,
    )
