"""Static MASVS property scanner for Android APK, XAPK and AAR artifacts."""

__version__ = "0.1.0"
