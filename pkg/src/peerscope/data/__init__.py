"""Bundled lexicons, stopwords and the fixture corpus."""
