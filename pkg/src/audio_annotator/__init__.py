"""Collaborative audio annotation service.

A library-first web backend for multi-user speech/audio labelling:
projects, role-gated accounts, key-authenticated audio ingestion,
per-annotator temporal segments with transcriptions and label values,
review workflow, deterministic JSON export, and an inter-annotator
word-error-rate quality pipeline. `audio_annotator.api.create_app`
builds the FastAPI application.
"""

__version__ = "0.1.0"
