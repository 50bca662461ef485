"""Exception types raised by bvguide."""


class GuideMapError(Exception):
    """Base class for all bvguide errors."""


class UnsupportedFormat(GuideMapError, ValueError):
    pass


class CorruptImage(GuideMapError, ValueError):
    pass


class RangeError(GuideMapError, ValueError):
    pass


class DimensionMismatch(GuideMapError, ValueError):
    pass


class GmapFormatError(GuideMapError, ValueError):
    """Malformed GMAP file."""


class BadMagic(GmapFormatError):
    pass


class BadVersion(GmapFormatError):
    pass


class TruncatedFile(GmapFormatError):
    pass


class InvalidKernelSize(GuideMapError, ValueError):
    pass


class ChannelMismatch(GuideMapError, ValueError):
    pass


class DegenerateHistogram(GuideMapError, ValueError):
    """All histogram mass sits in a single bin, so no threshold splits it."""


class CoverageGap(GuideMapError, ValueError):
    pass


class PlacementFailure(GuideMapError, RuntimeError):
    pass
