"""MOABB -> FaarFile export.

moabb/mne are imported lazily so the package can be installed (and its
manifest/format layers used) on machines without the MI ecosystem.
Exports are raw: no filtering is applied here, since the consuming
engine owns the 8-32 Hz band-pass for both offline and online paths.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .errors import DownloadFailure, EcosystemUnavailable, SubjectNotFound
from .faarfile import write_epochs
from .manifest import ExportManifest

# Supported motor-imagery datasets: moabb class name -> paradigm tag.
DATASET_REGISTRY: Dict[str, str] = {
    "BNCI2014_001": "left_right",
    "BNCI2014_004": "left_right",
    "Lee2019_MI": "left_right",
    "PhysionetMI": "motor_imagery",
    "Schirrmeister2017": "motor_imagery",
    "Zhou2016": "left_right",
}


@dataclasses.dataclass
class DatasetInfo:
    name: str
    paradigm: str
    n_subjects: int
    n_sessions: int


def _require_ecosystem():
    try:
        import mne  # noqa: F401
        import moabb.datasets
        import moabb.paradigms
    except ImportError as exc:
        raise EcosystemUnavailable(
            "moabb and mne are required for dataset access but are not "
            "installed; run `pip install moabb mne` (or install this "
            "package with the [moabb] extra) and retry"
        ) from exc
    return moabb.datasets, moabb.paradigms


def list_datasets() -> List[DatasetInfo]:
    """Enumerate supported MI datasets with subject/session counts."""
    datasets_mod, _ = _require_ecosystem()
    out = []
    for name in sorted(DATASET_REGISTRY):
        cls = getattr(datasets_mod, name, None)
        if cls is None:
            continue
        ds = cls()
        out.append(
            DatasetInfo(
                name=name,
                paradigm=DATASET_REGISTRY[name],
                n_subjects=len(ds.subject_list),
                n_sessions=int(getattr(ds, "n_sessions", 1)),
            )
        )
    return out


def _paradigm_for(tag: str, paradigms_mod):
    if tag == "left_right":
        return paradigms_mod.LeftRightImagery()
    return paradigms_mod.MotorImagery()


def export(
    dataset: str,
    subject: int,
    session: Optional[str],
    out_dir,
) -> tuple[List[Path], ExportManifest]:
    """Export one subject (optionally one session) to FaarFile corpora.

    Returns the written file paths and the manifest, and writes
    ``<dataset>_s<subject>_manifest.json`` alongside them. Payloads are
    in microvolts; epoch windows follow the paradigm defaults and are
    recorded in the manifest.
    """
    datasets_mod, paradigms_mod = _require_ecosystem()
    if dataset not in DATASET_REGISTRY:
        raise SubjectNotFound(f"unknown dataset {dataset!r}; see list_datasets()")
    ds = getattr(datasets_mod, dataset)()
    if subject not in ds.subject_list:
        raise SubjectNotFound(f"{dataset}: no subject {subject!r}")
    paradigm = _paradigm_for(DATASET_REGISTRY[dataset], paradigms_mod)
    try:
        epochs, y, meta = paradigm.get_data(ds, subjects=[subject], return_epochs=True)
    except (OSError, ValueError, RuntimeError) as exc:
        raise DownloadFailure(f"{dataset} subject {subject}: {exc}") from exc

    fs = float(epochs.info["sfreq"])
    channel_names = list(epochs.ch_names)
    x = epochs.get_data()
    sessions = sorted(meta["session"].unique())
    if session is not None:
        if session not in sessions:
            raise SubjectNotFound(f"{dataset} subject {subject}: no session {session!r}")
        sessions = [session]

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    classes = sorted(set(y))
    label_of = {c: i for i, c in enumerate(classes)}
    paths = []
    per_subject: Dict[str, List[str]] = {str(subject): []}
    for sess in sessions:
        mask = (meta["session"] == sess).to_numpy()
        data_uv = np.asarray(x[mask], dtype=np.float64) * 1e6
        p = out_dir / f"{dataset}_s{subject}_{sess}.faar"
        write_epochs(
            p,
            data_uv.astype(np.float32),
            fs,
            channel_names=channel_names,
            labels=[label_of[c] for c in np.asarray(y)[mask]],
            subject_id=str(subject),
            session_id=str(sess),
        )
        paths.append(p)
        per_subject[str(subject)].append(str(sess))

    manifest = ExportManifest(
        dataset_name=dataset,
        paradigm=DATASET_REGISTRY[dataset],
        fs=fs,
        channels=channel_names,
        event_window_s=tuple(float(v) for v in ds.interval),
        sessions_per_subject=per_subject,
    )
    (out_dir / f"{dataset}_s{subject}_manifest.json").write_text(manifest.to_json())
    return paths, manifest
