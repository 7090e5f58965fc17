"""Validated interpolation plans shipped with the package."""
