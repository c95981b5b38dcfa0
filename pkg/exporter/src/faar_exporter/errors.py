"""Error taxonomy for the exporter."""


class ExporterError(Exception):
    """Base class for exporter failures."""


class EcosystemUnavailable(ExporterError):
    """moabb/mne are not importable on this machine."""


class DownloadFailure(ExporterError):
    """A dataset download failed after retries."""


class SubjectNotFound(ExporterError):
    """The requested subject or session does not exist in the dataset."""
