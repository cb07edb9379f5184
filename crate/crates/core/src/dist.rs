//! One-dimensional block-row distributed matrices and panel views.

use std::ops::Range;

use thiserror::Error;

use crate::comm::{block_row_range, Communicator};
use crate::dense::{MatMut, MatRef, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PanelError {
    #[error("panel index {index} out of range for {count} panels")]
    OutOfRange { index: usize, count: usize },
    #[error("invalid panel width {width} for {cols} columns")]
    InvalidWidth { width: usize, cols: usize },
    #[error("invalid panel count {panels} for {cols} columns")]
    InvalidCount { panels: usize, cols: usize },
}

/// Column partition into `count` panels of `width` columns; the last panel
/// may be narrower.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PanelSpec {
    cols: usize,
    width: usize,
    count: usize,
}

impl PanelSpec {
    pub fn from_width(cols: usize, width: usize) -> Result<Self, PanelError> {
        if width == 0 || width > cols {
            return Err(PanelError::InvalidWidth { width, cols });
        }
        Ok(Self {
            cols,
            width,
            count: cols.div_ceil(width),
        })
    }

    /// Width `⌈cols / panels⌉`. With a ragged split the resulting panel count
    /// can be smaller than requested (e.g. 10 columns in 6 panels gives width 2,
    /// hence 5 panels).
    pub fn from_panels(cols: usize, panels: usize) -> Result<Self, PanelError> {
        if panels == 0 || panels > cols {
            return Err(PanelError::InvalidCount { panels, cols });
        }
        Self::from_width(cols, cols.div_ceil(panels))
    }

    /// A single panel spanning every column.
    pub fn whole(cols: usize) -> Self {
        Self {
            cols,
            width: cols,
            count: usize::from(cols > 0),
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn total_cols(&self) -> usize {
        self.cols
    }

    /// Columns of panel `j` (0-based).
    pub fn columns(&self, j: usize) -> Result<Range<usize>, PanelError> {
        if j >= self.count {
            return Err(PanelError::OutOfRange {
                index: j,
                count: self.count,
            });
        }
        Ok(j * self.width..((j + 1) * self.width).min(self.cols))
    }

    /// Columns right of panel `j`; empty for the last panel.
    pub fn trailing_columns(&self, j: usize) -> Range<usize> {
        ((j + 1) * self.width).min(self.cols)..self.cols
    }

    /// Columns of the first `j` panels.
    pub fn leading_columns(&self, j: usize) -> Result<Range<usize>, PanelError> {
        if j == 0 || j > self.count {
            return Err(PanelError::OutOfRange {
                index: j,
                count: self.count,
            });
        }
        Ok(0..(j * self.width).min(self.cols))
    }
}

/// The block row of a globally `global_rows × global_cols` matrix held by one
/// rank, together with that rank's communicator endpoint.
#[derive(Debug, Clone)]
pub struct DistributedMatrix {
    global_rows: usize,
    global_cols: usize,
    row_offset: usize,
    local: Matrix,
    comm: Communicator,
}

impl DistributedMatrix {
    /// Wraps an already-local block.
    pub fn from_local(comm: Communicator, global_rows: usize, row_offset: usize, local: Matrix) -> Self {
        Self {
            global_rows,
            global_cols: local.cols(),
            row_offset,
            local,
            comm,
        }
    }

    /// Takes this rank's block row of `global` under the scatter rule.
    pub fn from_global(comm: Communicator, global: &Matrix) -> Self {
        let range = block_row_range(global.rows(), comm.size(), comm.rank());
        let local = global.row_block(range.clone());
        Self::from_local(comm, global.rows(), range.start, local)
    }

    /// Same partition and communicator, new local block with the same row count.
    pub(crate) fn with_local(&self, local: Matrix) -> Self {
        debug_assert_eq!(local.rows(), self.local.rows());
        Self {
            global_rows: self.global_rows,
            global_cols: local.cols(),
            row_offset: self.row_offset,
            local,
            comm: self.comm.clone(),
        }
    }

    #[inline]
    pub fn global_rows(&self) -> usize {
        self.global_rows
    }

    #[inline]
    pub fn global_cols(&self) -> usize {
        self.global_cols
    }

    #[inline]
    pub fn row_offset(&self) -> usize {
        self.row_offset
    }

    pub fn local(&self) -> &Matrix {
        &self.local
    }

    pub fn local_mut(&mut self) -> &mut Matrix {
        &mut self.local
    }

    pub fn into_local(self) -> Matrix {
        self.local
    }

    pub fn comm(&self) -> &Communicator {
        &self.comm
    }

    pub fn panel(&self, j: usize, spec: &PanelSpec) -> Result<MatRef<'_>, PanelError> {
        Ok(self.local.columns(spec.columns(j)?))
    }

    pub fn panel_mut(&mut self, j: usize, spec: &PanelSpec) -> Result<MatMut<'_>, PanelError> {
        let cols = spec.columns(j)?;
        Ok(self.local.columns_mut(cols))
    }

    pub fn trailing(&self, j: usize, spec: &PanelSpec) -> MatRef<'_> {
        self.local.columns(spec.trailing_columns(j))
    }

    pub fn trailing_mut(&mut self, j: usize, spec: &PanelSpec) -> MatMut<'_> {
        self.local.columns_mut(spec.trailing_columns(j))
    }

    pub fn leading_panels(&self, j: usize, spec: &PanelSpec) -> Result<MatRef<'_>, PanelError> {
        Ok(self.local.columns(spec.leading_columns(j)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comm::{run, Backend};
    use proptest::prelude::*;

    #[test]
    fn panel_ranges() {
        let s = PanelSpec::from_width(6, 3).unwrap();
        assert_eq!(s.columns(1).unwrap(), 3..6);
        let s = PanelSpec::from_width(5, 3).unwrap();
        assert_eq!(s.count(), 2);
        assert_eq!(s.columns(1).unwrap(), 3..5);
        let s = PanelSpec::from_width(5, 5).unwrap();
        assert_eq!(s.columns(0).unwrap(), 0..5);
        assert!(matches!(s.columns(1), Err(PanelError::OutOfRange { .. })));
    }

    #[test]
    fn trailing_ranges() {
        let s = PanelSpec::from_width(6, 2).unwrap();
        assert_eq!(s.trailing_columns(0), 2..6);
        assert!(s.trailing_columns(s.count() - 1).is_empty());
        assert!(PanelSpec::whole(6).trailing_columns(0).is_empty());
    }

    #[test]
    fn leading_ranges() {
        let s = PanelSpec::from_width(6, 2).unwrap();
        assert_eq!(s.leading_columns(1).unwrap(), 0..2);
        assert_eq!(s.leading_columns(3).unwrap(), 0..6);
        assert_eq!(PanelSpec::whole(6).leading_columns(1).unwrap(), 0..6);
        assert!(s.leading_columns(0).is_err());
        assert!(s.leading_columns(4).is_err());
    }

    #[test]
    fn from_panels_rounds_width_up() {
        let s = PanelSpec::from_panels(10, 6).unwrap();
        assert_eq!((s.width(), s.count()), (2, 5));
        let s = PanelSpec::from_panels(300, 3).unwrap();
        assert_eq!((s.width(), s.count()), (100, 3));
        assert!(PanelSpec::from_panels(4, 0).is_err());
        assert!(PanelSpec::from_panels(4, 5).is_err());
        assert!(PanelSpec::from_width(4, 0).is_err());
    }

    #[test]
    fn views_alias_local_block() {
        let global = Matrix::from_fn(6, 4, |i, j| (10 * i + j) as f64);
        let out = run(Backend::Serial, 2, |c| {
            let global = global.clone();
            async move {
                let mut dm = DistributedMatrix::from_global(c, &global);
                let spec = PanelSpec::from_width(4, 2).unwrap();
                dm.panel_mut(1, &spec).unwrap().col_mut(0)[0] = -1.0;
                assert_eq!(dm.trailing(0, &spec).get(0, 0), -1.0);
                (dm.row_offset(), dm.local().get(0, 2))
            }
        })
        .unwrap();
        assert_eq!(out, vec![(0, -1.0), (3, -1.0)]);
    }

    proptest! {
        #[test]
        fn panels_partition_columns(cols in 1usize..80, width_seed in 0usize..1000) {
            let width = 1 + width_seed % cols;
            let s = PanelSpec::from_width(cols, width).unwrap();
            let mut next = 0;
            for j in 0..s.count() {
                let r = s.columns(j).unwrap();
                prop_assert_eq!(r.start, next);
                prop_assert!(!r.is_empty());
                prop_assert_eq!(s.leading_columns(j + 1).unwrap().end, r.end);
                prop_assert_eq!(s.trailing_columns(j).start, r.end);
                next = r.end;
            }
            prop_assert_eq!(next, cols);
        }
    }
}
