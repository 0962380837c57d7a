"""peerscope: analytics for peer-review submission corpora."""
__version__ = "0.1.0"
