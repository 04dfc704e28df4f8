//! Grey-value and binary images stored as row-major buffers.

use crate::error::{check_probability, Error, Result};
use crate::rng::RngStream;

/// Grey-value image with intensities in `[0, 1]`, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    intensities: Vec<f64>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, intensities: Vec<f64>) -> Result<Self> {
        check_len(rows, cols, intensities.len())?;
        if let Some(bad) = intensities.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::param(
                "intensities",
                format!("{bad} is outside [0, 1]"),
            ));
        }
        Ok(GrayImage {
            rows,
            cols,
            intensities,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }
}

/// Binary image; `true` marks an active site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    rows: usize,
    cols: usize,
    active: Vec<bool>,
}

impl BinaryImage {
    pub fn new(rows: usize, cols: usize, active: Vec<bool>) -> Result<Self> {
        check_len(rows, cols, active.len())?;
        Ok(BinaryImage { rows, cols, active })
    }

    /// Builds an image from `0`/`1` flags; any other value is rejected.
    pub fn from_flags(rows: usize, cols: usize, flags: &[u8]) -> Result<Self> {
        let active = flags
            .iter()
            .map(|&f| match f {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::param("flags", format!("{other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols, active)
    }

    pub fn filled(rows: usize, cols: usize, value: bool) -> Result<Self> {
        let len = rows
            .checked_mul(cols)
            .ok_or(Error::InvalidDimension { rows, cols })?;
        Self::new(rows, cols, vec![value; len])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    #[inline]
    pub fn is_active(&self, site: usize) -> bool {
        self.active[site]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

fn check_len(rows: usize, cols: usize, len: usize) -> Result<()> {
    let expected = rows
        .checked_mul(cols)
        .filter(|&s| s > 0)
        .ok_or(Error::InvalidDimension { rows, cols })?;
    if expected != len {
        return Err(Error::Shape {
            expected: format!("{rows}x{cols} = {expected} pixels"),
            found: format!("{len} pixels"),
        });
    }
    Ok(())
}

/// Which side of the threshold counts as active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Active when `intensity >= tau`; ties are active.
    #[default]
    ActiveIfGeq,
    /// Active when `intensity < tau`.
    ActiveIfLt,
}

/// Thresholds a grey-value image at `tau`.
pub fn threshold(image: &GrayImage, tau: f64, direction: Direction) -> Result<BinaryImage> {
    check_probability("tau", tau)?;
    let active = image
        .intensities
        .iter()
        .map(|&v| match direction {
            Direction::ActiveIfGeq => v >= tau,
            Direction::ActiveIfLt => v < tau,
        })
        .collect();
    BinaryImage::new(image.rows, image.cols, active)
}

/// Site percolation: every pixel is active independently with probability `p`.
pub fn generate_percolation(
    p: f64,
    rows: usize,
    cols: usize,
    rng: &mut RngStream,
) -> Result<BinaryImage> {
    check_probability("p", p)?;
    let len = rows
        .checked_mul(cols)
        .filter(|&s| s > 0)
        .ok_or(Error::InvalidDimension { rows, cols })?;
    let active = (0..len).map(|_| rng.bernoulli(p)).collect();
    BinaryImage::new(rows, cols, active)
}
