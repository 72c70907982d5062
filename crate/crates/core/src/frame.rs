//! Frames, grids and regions of interest.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest valid depth reading (11-bit sensor).
pub const MAX_DEPTH: u16 = 2047;

/// Depth value reserved for "no reading".
pub const NO_READING: u16 = 0;

/// Row-major 2-D grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Grid { width, height, data: vec![value; width * height] }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (data.len(), 1),
            });
        }
        Ok(Grid { width, height, data })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.data[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn rows(&self) -> core::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.width.max(1))
    }

    /// Copies the `roi` sub-grid into `out`, resizing `out` if needed.
    pub fn crop_into(&self, roi: Roi, out: &mut Grid<T>) -> Result<()> {
        roi.check_inside(self.width, self.height)?;
        out.width = roi.w;
        out.height = roi.h;
        out.data.clear();
        for row in self.data.chunks_exact(self.width.max(1)).skip(roi.y).take(roi.h) {
            out.data.extend_from_slice(&row[roi.x..roi.x + roi.w]);
        }
        Ok(())
    }

    pub fn crop(&self, roi: Roi) -> Result<Grid<T>> {
        let mut out = Grid { width: 0, height: 0, data: Vec::with_capacity(roi.area()) };
        self.crop_into(roi, &mut out)?;
        Ok(out)
    }
}

/// Axis-aligned rectangle in pixel units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Roi {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Roi {
    pub const DEFAULT_WIDTH: usize = 320;
    pub const DEFAULT_HEIGHT: usize = 350;

    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Roi { x, y, w, h }
    }

    /// The default bed ROI, centred horizontally in a `width`x`height` frame
    /// and clamped to it.
    pub fn default_for(width: usize, height: usize) -> Self {
        let w = Self::DEFAULT_WIDTH.min(width);
        let h = Self::DEFAULT_HEIGHT.min(height);
        Roi { x: (width - w) / 2, y: (height - h) / 2, w, h }
    }

    pub const fn full(width: usize, height: usize) -> Self {
        Roi { x: 0, y: 0, w: width, h: height }
    }

    #[inline]
    pub const fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn check_inside(&self, width: usize, height: usize) -> Result<()> {
        let fits_x = self.x.checked_add(self.w).is_some_and(|e| e <= width);
        let fits_y = self.y.checked_add(self.h).is_some_and(|e| e <= height);
        if fits_x && fits_y && self.w > 0 && self.h > 0 {
            Ok(())
        } else {
            Err(Error::RoiOutOfRange)
        }
    }
}

/// One depth image; 0 means "no reading", valid readings are 1..=2047.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepthFrame {
    pub index: usize,
    pub pixels: Grid<u16>,
}

impl DepthFrame {
    pub fn new(index: usize, pixels: Grid<u16>) -> Self {
        DepthFrame { index, pixels }
    }

    pub fn validate(&self) -> Result<()> {
        match self.pixels.as_slice().iter().find(|&&v| v > MAX_DEPTH) {
            Some(&value) => Err(Error::InvalidDepthSample { frame: self.index, value }),
            None => Ok(()),
        }
    }

    pub fn crop_roi(&self, roi: Roi) -> Result<DepthFrame> {
        Ok(DepthFrame { index: self.index, pixels: self.pixels.crop(roi)? })
    }
}

pub type Rgb = [u8; 3];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorFrame {
    pub index: usize,
    pub pixels: Grid<Rgb>,
}

impl ColorFrame {
    pub fn new(index: usize, pixels: Grid<Rgb>) -> Self {
        ColorFrame { index, pixels }
    }

    pub fn crop_roi(&self, roi: Roi) -> Result<ColorFrame> {
        Ok(ColorFrame { index: self.index, pixels: self.pixels.crop(roi)? })
    }
}

/// `round(0.299 r + 0.587 g + 0.114 b)`, computed exactly in integers.
#[inline]
pub fn luma([r, g, b]: Rgb) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Luma of the `roi` part of `src`, written into `out`.
pub fn luma_roi_into(src: &Grid<Rgb>, roi: Roi, out: &mut Grid<u8>) -> Result<()> {
    roi.check_inside(src.width, src.height)?;
    out.width = roi.w;
    out.height = roi.h;
    out.data.clear();
    for row in src.data.chunks_exact(src.width).skip(roi.y).take(roi.h) {
        out.data.extend(row[roi.x..roi.x + roi.w].iter().map(|&p| luma(p)));
    }
    Ok(())
}

impl<T: Copy + Default> Default for Grid<T> {
    fn default() -> Self {
        Grid { width: 0, height: 0, data: Vec::new() }
    }
}
