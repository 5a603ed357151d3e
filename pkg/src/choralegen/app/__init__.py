"""Command-line interface and HTTP composition service."""
