"""Seed streams and worker pool."""
