"""hypsurf package."""
