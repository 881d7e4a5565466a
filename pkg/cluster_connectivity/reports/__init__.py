"""Clustering file input and report output."""
