"""Test suite for the nuspectra package."""
