"""Persistent entity model.

Uniqueness and referential rules live in the schema so they hold inside
the writing transaction rather than in racy pre-checks. Cascade chains:
project -> labels -> values, and project -> datapoints -> assignments ->
segments -> selections. Users are never cascade-deleted; `store` guards
user/label deletion at the application level (ERR_IN_USE).
"""

from __future__ import annotations

from datetime import datetime

from sqlalchemy import (
    Boolean,
    DateTime,
    ForeignKey,
    Integer,
    String,
    Text,
    UniqueConstraint,
)
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column, relationship

ROLES = ("admin", "annotator")
SELECTION_TYPES = ("single", "multi")
AUDIO_FORMATS = ("wav", "mp3", "ogg")
ASSIGNMENT_STATUSES = ("pending", "completed")


class Base(DeclarativeBase):
    pass


class User(Base):
    __tablename__ = "users"

    id: Mapped[int] = mapped_column(primary_key=True)
    username: Mapped[str] = mapped_column(String(255), unique=True)
    credential_digest: Mapped[str] = mapped_column(String(512))
    role: Mapped[str] = mapped_column(String(16))
    created_at: Mapped[datetime] = mapped_column(DateTime)


class Project(Base):
    __tablename__ = "projects"

    id: Mapped[int] = mapped_column(primary_key=True)
    name: Mapped[str] = mapped_column(String(255), unique=True)
    api_key: Mapped[str] = mapped_column(String(64), unique=True)
    created_at: Mapped[datetime] = mapped_column(DateTime)

    labels: Mapped[list["Label"]] = relationship(
        back_populates="project", cascade="all, delete-orphan", passive_deletes=True
    )


class Membership(Base):
    __tablename__ = "memberships"

    user_id: Mapped[int] = mapped_column(
        ForeignKey("users.id", ondelete="CASCADE"), primary_key=True
    )
    project_id: Mapped[int] = mapped_column(
        ForeignKey("projects.id", ondelete="CASCADE"), primary_key=True
    )


class Label(Base):
    __tablename__ = "labels"
    __table_args__ = (UniqueConstraint("project_id", "name"),)

    id: Mapped[int] = mapped_column(primary_key=True)
    project_id: Mapped[int] = mapped_column(
        ForeignKey("projects.id", ondelete="CASCADE")
    )
    name: Mapped[str] = mapped_column(String(255))
    selection_type: Mapped[str] = mapped_column(String(16))

    project: Mapped[Project] = relationship(back_populates="labels")
    values: Mapped[list["LabelValue"]] = relationship(
        back_populates="label", cascade="all, delete-orphan", passive_deletes=True
    )


class LabelValue(Base):
    __tablename__ = "label_values"
    __table_args__ = (UniqueConstraint("label_id", "value"),)

    id: Mapped[int] = mapped_column(primary_key=True)
    label_id: Mapped[int] = mapped_column(ForeignKey("labels.id", ondelete="CASCADE"))
    value: Mapped[str] = mapped_column(String(255))

    label: Mapped[Label] = relationship(back_populates="values")


class DataPoint(Base):
    __tablename__ = "datapoints"

    id: Mapped[int] = mapped_column(primary_key=True)
    project_id: Mapped[int] = mapped_column(
        ForeignKey("projects.id", ondelete="CASCADE")
    )
    original_filename: Mapped[str] = mapped_column(Text)
    stored_name: Mapped[str] = mapped_column(String(64), unique=True)
    format: Mapped[str] = mapped_column(String(8))
    duration_ms: Mapped[int] = mapped_column(Integer)
    reference_transcription: Mapped[str | None] = mapped_column(Text, nullable=True)
    created_at: Mapped[datetime] = mapped_column(DateTime)


class Assignment(Base):
    __tablename__ = "assignments"
    __table_args__ = (UniqueConstraint("datapoint_id", "user_id"),)

    id: Mapped[int] = mapped_column(primary_key=True)
    datapoint_id: Mapped[int] = mapped_column(
        ForeignKey("datapoints.id", ondelete="CASCADE")
    )
    # RESTRICT backstops the application-level ERR_IN_USE guard on user
    # deletion; the project cascade reaches assignments via datapoint_id.
    user_id: Mapped[int] = mapped_column(ForeignKey("users.id", ondelete="RESTRICT"))
    status: Mapped[str] = mapped_column(String(16), default="pending")
    marked_for_review: Mapped[bool] = mapped_column(Boolean, default=False)
    updated_at: Mapped[datetime] = mapped_column(DateTime)

    segments: Mapped[list["Segment"]] = relationship(
        back_populates="assignment", cascade="all, delete-orphan", passive_deletes=True
    )


class Segment(Base):
    __tablename__ = "segments"

    id: Mapped[int] = mapped_column(primary_key=True)
    assignment_id: Mapped[int] = mapped_column(
        ForeignKey("assignments.id", ondelete="CASCADE")
    )
    start_ms: Mapped[int] = mapped_column(Integer)
    end_ms: Mapped[int] = mapped_column(Integer)
    transcription: Mapped[str] = mapped_column(Text, default="")
    created_at: Mapped[datetime] = mapped_column(DateTime)
    updated_at: Mapped[datetime] = mapped_column(DateTime)

    assignment: Mapped[Assignment] = relationship(back_populates="segments")
    selections: Mapped[list["SegmentSelection"]] = relationship(
        back_populates="segment", cascade="all, delete-orphan", passive_deletes=True
    )


class SegmentSelection(Base):
    """One chosen label value on one segment."""

    __tablename__ = "segment_selections"

    segment_id: Mapped[int] = mapped_column(
        ForeignKey("segments.id", ondelete="CASCADE"), primary_key=True
    )
    label_id: Mapped[int] = mapped_column(
        ForeignKey("labels.id", ondelete="CASCADE"), primary_key=True
    )
    label_value_id: Mapped[int] = mapped_column(
        ForeignKey("label_values.id", ondelete="CASCADE"), primary_key=True
    )

    segment: Mapped[Segment] = relationship(back_populates="selections")
