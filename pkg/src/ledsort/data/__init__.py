"""Embedded CMF and ellipse datasets (plain-text tables)."""
