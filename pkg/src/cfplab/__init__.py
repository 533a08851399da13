"""Common-fixed-point laboratory for three selfmaps on real metric spaces."""
