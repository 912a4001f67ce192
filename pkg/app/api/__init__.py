"""API routers for linkage-bonds."""
