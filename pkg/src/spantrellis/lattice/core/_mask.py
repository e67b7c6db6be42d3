"""Relax a given alignment into a band of admissible trellis cells.

The annotated path marks one cell per step in the label and blank
matrices. Dilating both boolean images with a rectangular unit filter of
size (1 + 2*delta_t, 1 + 2*delta_u) admits every cell within that
distance of the path; cells outside the trellis are clipped away.
"""

import numpy as np
from scipy.ndimage import binary_dilation

from spantrellis.utils.errors import ContractViolation

from .main import AlignmentPath, ConstraintMask


class MaskDilator:
    """Dilate a boolean cell image with a rectangular structuring element."""

    def __init__(self, delta_t: int, delta_u: int) -> None:
        """
        Args:
            delta_t (int): Half-width along frames (rows).
            delta_u (int): Half-width along labels (columns).
        """
        if delta_t < 0 or delta_u < 0:
            raise ContractViolation(f"Relaxation must be non-negative, got ({delta_t}, {delta_u}).")
        self.delta_t = delta_t
        self.delta_u = delta_u

    def dilate(self, cells: np.ndarray) -> np.ndarray:
        """Return the dilated image, same shape as ``cells``."""
        if cells.size == 0:
            return cells.copy()
        # A filter wider than the image admits everything it can reach anyway.
        dt = min(self.delta_t, cells.shape[0])
        du = min(self.delta_u, cells.shape[1])
        structure = np.ones((2 * dt + 1, 2 * du + 1), dtype=bool)
        return binary_dilation(cells, structure=structure, border_value=0)


class ConstraintMaskBuilder:
    """Build the ConstraintMask of an annotated alignment."""

    def __init__(self, path: AlignmentPath) -> None:
        """
        Args:
            path (AlignmentPath): Annotated alignment to relax.
        """
        self.path = path

    def build(self, delta_t: int, delta_u: int) -> ConstraintMask:
        """Relax the path by (delta_t, delta_u).

        Returns:
            ConstraintMask: Masks that contain every path cell; delta 0
            admits exactly the path.
        """
        label_cells, blank_cells = self.path.cell_masks()
        dilator = MaskDilator(delta_t=delta_t, delta_u=delta_u)
        return ConstraintMask(
            label_mask=dilator.dilate(label_cells),
            blank_mask=dilator.dilate(blank_cells),
            delta_t=delta_t,
            delta_u=delta_u,
        )
