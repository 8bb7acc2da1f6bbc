"""Audio format detection and duration probing from container headers.

Only WAV, MP3 and Ogg (Vorbis/Opus) are accepted.  Durations are read
from the headers alone — no decoding — and reported as whole
milliseconds, truncated.

Error contract:

* bytes that match no known magic number -> ``ERR_BAD_FORMAT``
* recognized magic but unparseable structure, or a parsed duration of
  zero -> ``ERR_CORRUPT``
* payload over the configured cap -> ``ERR_TOO_LARGE`` (checked before
  any parsing)
"""

from __future__ import annotations

import struct

from . import errors
from .errors import ServiceError

# MPEG1 Layer III tables (the only MP3 flavor we accept)
_MP3_BITRATES_KBPS = [
    None, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320, None
]
_MP3_SAMPLE_RATES = [44100, 48000, 32000, None]
_MP3_SAMPLES_PER_FRAME = 1152


def _corrupt(detail: str = "") -> ServiceError:
    return ServiceError(errors.ERR_CORRUPT, detail)


def _probe_wav(data: bytes) -> int:
    """Duration from the fmt chunk byte rate and the data chunk size."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise _corrupt("not a RIFF/WAVE stream")
    byte_rate = None
    data_size = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        chunk_size = int.from_bytes(data[pos + 4:pos + 8], "little")
        body = data[pos + 8:pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise _corrupt("fmt chunk truncated")
            byte_rate = int.from_bytes(body[8:12], "little")
        elif chunk_id == b"data":
            data_size = chunk_size
        # chunks are word-aligned
        pos += 8 + chunk_size + (chunk_size & 1)
    if byte_rate is None or data_size is None:
        raise _corrupt("missing fmt or data chunk")
    if byte_rate <= 0 or data_size <= 0:
        raise _corrupt("empty audio stream")
    return data_size * 1000 // byte_rate


def _skip_id3v2(data: bytes) -> int:
    if len(data) >= 10 and data[:3] == b"ID3":
        size = (
            (data[6] & 0x7F) << 21
            | (data[7] & 0x7F) << 14
            | (data[8] & 0x7F) << 7
            | (data[9] & 0x7F)
        )
        return 10 + size
    return 0


def _probe_mp3(data: bytes) -> int:
    """Walk MPEG1 Layer III frames, summing samples per frame."""
    pos = _skip_id3v2(data)
    total_samples = 0
    while pos + 4 <= len(data):
        b0, b1, b2 = data[pos], data[pos + 1], data[pos + 2]
        if b0 != 0xFF or (b1 & 0xE0) != 0xE0:
            break  # trailing junk (e.g. an ID3v1 tag) ends the walk
        version = (b1 >> 3) & 0x03
        layer = (b1 >> 1) & 0x03
        if version != 0b11 or layer != 0b01:
            raise _corrupt("only MPEG1 Layer III frames are supported")
        bitrate_kbps = _MP3_BITRATES_KBPS[(b2 >> 4) & 0x0F]
        sample_rate = _MP3_SAMPLE_RATES[(b2 >> 2) & 0x03]
        if bitrate_kbps is None or sample_rate is None:
            raise _corrupt("invalid frame header field")
        padding = (b2 >> 1) & 0x01
        frame_len = 144 * bitrate_kbps * 1000 // sample_rate + padding
        total_samples += _MP3_SAMPLES_PER_FRAME
        last_rate = sample_rate
        pos += frame_len
    if total_samples == 0:
        raise _corrupt("no audio frames found")
    return total_samples * 1000 // last_rate


def _ogg_pages(data: bytes):
    pos = 0
    while pos + 27 <= len(data):
        if data[pos:pos + 4] != b"OggS":
            raise _corrupt("bad page capture pattern")
        granule = struct.unpack_from("<q", data, pos + 6)[0]
        n_segments = data[pos + 26]
        lacing_end = pos + 27 + n_segments
        if lacing_end > len(data):
            raise _corrupt("truncated page header")
        body_len = sum(data[pos + 27:lacing_end])
        body_end = lacing_end + body_len
        if body_end > len(data):
            raise _corrupt("truncated page body")
        yield granule, data[lacing_end:body_end]
        pos = body_end
    if pos != len(data):
        raise _corrupt("trailing bytes after last page")


def _probe_ogg(data: bytes) -> int:
    """Duration from the last page granule position and the id header rate."""
    sample_rate = None
    pre_skip = 0
    last_granule = 0
    for i, (granule, body) in enumerate(_ogg_pages(data)):
        if i == 0:
            if body.startswith(b"\x01vorbis"):
                if len(body) < 16:
                    raise _corrupt("vorbis id header truncated")
                sample_rate = struct.unpack_from("<I", body, 12)[0]
            elif body.startswith(b"OpusHead"):
                if len(body) < 12:
                    raise _corrupt("opus id header truncated")
                pre_skip = struct.unpack_from("<H", body, 10)[0]
                sample_rate = 48000  # Opus granules always tick at 48 kHz
            else:
                raise _corrupt("unrecognized codec id header")
        if granule > 0:
            last_granule = granule
    if sample_rate is None or sample_rate <= 0:
        raise _corrupt("missing id header")
    samples = last_granule - pre_skip
    if samples <= 0:
        raise _corrupt("empty audio stream")
    return samples * 1000 // sample_rate


def detect_format(data: bytes) -> str:
    if len(data) >= 12 and data[:4] == b"RIFF" and data[8:12] == b"WAVE":
        return "wav"
    if data[:4] == b"OggS":
        return "ogg"
    if data[:3] == b"ID3":
        return "mp3"
    if len(data) >= 2 and data[0] == 0xFF and (data[1] & 0xE0) == 0xE0:
        return "mp3"
    raise ServiceError(errors.ERR_BAD_FORMAT, "unrecognized audio container")


def validate_audio(data: bytes, max_bytes: int | None = None) -> tuple[str, int]:
    """Return ``(format, duration_ms)`` or raise a ``ServiceError``."""
    if max_bytes is not None and len(data) > max_bytes:
        raise ServiceError(
            errors.ERR_TOO_LARGE, f"payload exceeds {max_bytes} byte cap"
        )
    fmt = detect_format(data)
    if fmt == "wav":
        duration_ms = _probe_wav(data)
    elif fmt == "mp3":
        duration_ms = _probe_mp3(data)
    else:
        duration_ms = _probe_ogg(data)
    if duration_ms <= 0:
        raise _corrupt("zero-length audio")
    return fmt, duration_ms
