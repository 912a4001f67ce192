"""linkage-bonds application package."""
