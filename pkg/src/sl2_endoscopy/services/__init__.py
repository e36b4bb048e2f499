"""Report building services."""
