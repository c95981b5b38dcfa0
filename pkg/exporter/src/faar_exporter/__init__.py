"""Export public MOABB motor-imagery datasets to FaarFile corpora."""

from .errors import DownloadFailure, EcosystemUnavailable, ExporterError, SubjectNotFound
from .exporter import DATASET_REGISTRY, DatasetInfo, export, list_datasets
from .faarfile import write_epochs
from .manifest import ExportManifest, cross_session_manifest

__all__ = [
    "DATASET_REGISTRY",
    "DatasetInfo",
    "DownloadFailure",
    "EcosystemUnavailable",
    "ExportManifest",
    "ExporterError",
    "SubjectNotFound",
    "cross_session_manifest",
    "export",
    "list_datasets",
    "write_epochs",
]
