"""Exact jet-space analysis of linear constant-coefficient first-order PDE systems."""

__version__ = "0.1.0"

from .jets import CoordinateChange, PDESystem, change_coordinates, prolongation_matrix, tableau_dim  # noqa: E402

__all__ = ["CoordinateChange", "PDESystem", "change_coordinates", "prolongation_matrix", "tableau_dim",
           "__version__"]
