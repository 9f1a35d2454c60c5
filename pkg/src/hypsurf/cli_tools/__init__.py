"""CLI subpackage for hypsurf."""
