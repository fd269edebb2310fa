"""8-bit grayscale image I/O (PGM P2/P5), LUT application, histograms and the
Michelson contrast metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PtmpixError


class PgmError(PtmpixError):
    pass


class BadMagic(PgmError):
    pass


class BadHeader(PgmError):
    pass


class TruncatedData(PgmError):
    pass


class MaxvalTooLarge(PgmError):
    pass


class ZeroBaseContrast(PtmpixError):
    """Improvement factor is undefined when the input contrast is zero."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Immutable 8-bit grayscale image; ``pixels`` is (height, width) uint8."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = self.pixels
        if px.ndim != 2 or px.dtype != np.uint8:
            raise ValueError("pixels must be a 2-D uint8 array")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("width and height must be >= 1")
        px.flags.writeable = False

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class Histogram:
    bins: tuple[int, ...]
    l_min: int
    l_max: int


@dataclass(frozen=True)
class ContrastReport:
    cr_before: float
    cr_after: float
    improvement: float
    before_levels: tuple[int, int]
    after_levels: tuple[int, int]


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    # Whitespace-separated header tokens with '#'-to-EOL comments; returns the
    # offset of the byte that terminated the last token.
    tokens: list[bytes] = []
    i, n = 0, len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == 0x23:  # '#'
            while i < n and data[i] not in (0x0A, 0x0D):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i] != 0x23:
            i += 1
        if start == i:
            raise BadHeader("unexpected end of header")
        tokens.append(data[start:i])
    return tokens, i


def read_pgm(data: bytes) -> GrayImage:
    """Parse a P2 (ASCII) or P5 (binary) PGM with maxval <= 255.

    Both encodings of the same pixels parse to equal images.  Samples are
    taken verbatim (no maxval rescaling); anything that cannot be an 8-bit
    code raises ``BadHeader``.
    """
    try:
        (magic,), _ = _header_tokens(data, 1)
    except BadHeader:
        raise BadMagic("empty or unreadable header") from None
    if magic not in (b"P2", b"P5"):
        raise BadMagic(f"not a P2/P5 PGM (magic {magic[:8]!r})")

    tokens, end = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError:
        raise BadHeader(f"non-numeric header field in {tokens[1:4]!r}") from None
    if width < 1 or height < 1:
        raise BadHeader(f"bad dimensions {width} x {height}")
    if maxval > 255:
        raise MaxvalTooLarge(f"maxval {maxval} exceeds 255")
    if maxval < 1:
        raise BadHeader(f"bad maxval {maxval}")

    count = width * height
    if magic == b"P5":
        if end >= len(data) or not data[end : end + 1].isspace():
            raise BadHeader("missing whitespace before binary raster")
        raster = data[end + 1 : end + 1 + count]
        if len(raster) < count:
            raise TruncatedData(f"raster holds {len(raster)} of {count} samples")
        px = np.frombuffer(raster, dtype=np.uint8, count=count)
    else:
        fields = data[end:].split()
        if len(fields) < count:
            raise TruncatedData(f"raster holds {len(fields)} of {count} samples")
        try:
            values = [int(f) for f in fields[:count]]
        except ValueError:
            raise BadHeader("non-numeric sample in ASCII raster") from None
        if any(v < 0 or v > 255 for v in values):
            raise BadHeader("sample outside 0..255")
        px = np.asarray(values, dtype=np.uint8)
    return GrayImage(px.reshape(height, width).copy())


def write_pgm(image: GrayImage, variant: str = "P5") -> bytes:
    """Serialize to PGM bytes; output is deterministic, maxval always 255."""
    if variant not in ("P2", "P5"):
        raise ValueError("variant must be 'P2' or 'P5'")
    header = f"{variant}\n{image.width} {image.height}\n255\n".encode("ascii")
    if variant == "P5":
        return header + image.pixels.tobytes()
    rows = (" ".join(str(int(v)) for v in row) for row in image.pixels)
    return header + ("\n".join(rows) + "\n").encode("ascii")


def apply_lut(image: GrayImage, lut) -> GrayImage:
    """Per-pixel table lookup; the 256-entry LUT is the whole pixel model."""
    table = np.asarray(lut)
    if table.shape != (256,):
        raise ValueError("lut must have exactly 256 entries")
    if table.min() < 0 or table.max() > 255:
        raise ValueError("lut entries must lie in 0..255")
    return GrayImage(table.astype(np.uint8)[image.pixels])


def histogram(image: GrayImage) -> Histogram:
    counts = np.bincount(image.pixels.ravel(), minlength=256)
    occupied = np.nonzero(counts)[0]
    return Histogram(tuple(int(c) for c in counts), int(occupied[0]), int(occupied[-1]))


def michelson_cr(image: GrayImage) -> float:
    """(l_max - l_min) / (l_max + l_min) over occupied codes; 0 for all-black."""
    l_min = int(image.pixels.min())
    l_max = int(image.pixels.max())
    if l_max == 0:
        return 0.0
    return (l_max - l_min) / (l_max + l_min)


def enhancement_report(before: GrayImage, after: GrayImage) -> ContrastReport:
    if before.pixels.shape != after.pixels.shape:
        raise ValueError("before/after dimensions differ")
    cr_b = michelson_cr(before)
    cr_a = michelson_cr(after)
    if cr_b == 0.0:
        raise ZeroBaseContrast("input image has zero contrast")
    return ContrastReport(
        cr_b,
        cr_a,
        cr_a / cr_b,
        (int(before.pixels.min()), int(before.pixels.max())),
        (int(after.pixels.min()), int(after.pixels.max())),
    )


def synth_low_contrast(
    width: int, height: int, l_min: int, l_max: int, seed: int
) -> GrayImage:
    """Seeded uniform image over [l_min, l_max].

    The first two pixels (row-major) are forced to l_min and l_max so the
    histogram spans exactly the requested range.
    """
    if not 0 <= l_min <= l_max <= 255:
        raise ValueError("requires 0 <= l_min <= l_max <= 255")
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    rng = np.random.default_rng(seed)
    flat = rng.integers(l_min, l_max + 1, size=width * height).astype(np.uint8)
    flat[0] = l_min
    if flat.size > 1:
        flat[1] = l_max
    return GrayImage(flat.reshape(height, width))


def histogram_json(hist: Histogram, cr: float) -> str:
    """Histogram report JSON; floats fixed at 6 decimals for byte stability."""
    bins = ",".join(str(b) for b in hist.bins)
    return (
        f'{{"bins":[{bins}],"l_min":{hist.l_min},"l_max":{hist.l_max},'
        f'"cr":{cr:.6f}}}\n'
    )


def report_json(report: ContrastReport) -> str:
    return (
        f'{{"cr_before":{report.cr_before:.6f},"cr_after":{report.cr_after:.6f},'
        f'"improvement":{report.improvement:.6f}}}\n'
    )
