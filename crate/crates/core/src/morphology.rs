//! Binary foreground masks and 3x3 square-element morphology.
//!
//! Pixels outside the grid count as background for both erosion and
//! dilation. The square element is separable, so every operator is a
//! horizontal pass followed by a vertical pass.

use alloc::vec::Vec;

use crate::frame::Grid;

/// Binary mask over the ROI; 1 = foreground, 0 = background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForegroundMask {
    grid: Grid<u8>,
}

impl ForegroundMask {
    pub fn empty(width: usize, height: usize) -> Self {
        ForegroundMask { grid: Grid::filled(width, height, 0) }
    }

    /// Builds a mask from any 0/non-zero grid.
    pub fn from_grid(grid: &Grid<u8>) -> Self {
        let data = grid.as_slice().iter().map(|&v| (v != 0) as u8).collect();
        ForegroundMask { grid: Grid::from_vec(grid.width(), grid.height(), data).expect("same dims") }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                m.grid.set(x, y, f(x, y) as u8);
            }
        }
        m
    }

    pub(crate) fn reset(&mut self, width: usize, height: usize) {
        if self.grid.dims() != (width, height) {
            self.grid = Grid::filled(width, height, 0);
        }
    }

    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.grid.dims()
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.grid.get(x, y)
    }

    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.grid.set(x, y, on as u8);
    }

    pub fn as_slice(&self) -> &[u8] {
        self.grid.as_slice()
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [u8] {
        self.grid.as_mut_slice()
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> usize {
        self.grid.as_slice().iter().map(|&v| v as usize).sum()
    }
}

pub fn foreground_area(mask: &ForegroundMask) -> usize {
    mask.count()
}

#[derive(Clone, Copy)]
enum Op {
    Erode,
    Dilate,
}

/// Reusable buffers for the separable passes.
#[derive(Debug, Default, Clone)]
pub struct MorphScratch {
    tmp: Vec<u8>,
}

impl MorphScratch {
    pub fn new() -> Self {
        Self::default()
    }

    fn apply(&mut self, mask: &mut ForegroundMask, op: Op) {
        let (w, h) = mask.dims();
        if w == 0 || h == 0 {
            return;
        }
        let data = mask.grid.as_mut_slice();
        self.tmp.clear();
        self.tmp.resize(w * h, 0);

        // horizontal
        for (src, dst) in data.chunks_exact(w).zip(self.tmp.chunks_exact_mut(w)) {
            for x in 0..w {
                let l = if x > 0 { src[x - 1] } else { 0 };
                let r = if x + 1 < w { src[x + 1] } else { 0 };
                dst[x] = combine(op, l, src[x], r);
            }
        }
        // vertical
        for y in 0..h {
            let up = if y > 0 { Some(&self.tmp[(y - 1) * w..y * w]) } else { None };
            let mid = &self.tmp[y * w..(y + 1) * w];
            let down = if y + 1 < h { Some(&self.tmp[(y + 1) * w..(y + 2) * w]) } else { None };
            let dst = &mut data[y * w..(y + 1) * w];
            for x in 0..w {
                let u = up.map_or(0, |r| r[x]);
                let d = down.map_or(0, |r| r[x]);
                dst[x] = combine(op, u, mid[x], d);
            }
        }
    }

    pub fn erode(&mut self, mask: &mut ForegroundMask) {
        self.apply(mask, Op::Erode);
    }

    pub fn dilate(&mut self, mask: &mut ForegroundMask) {
        self.apply(mask, Op::Dilate);
    }

    /// Opening followed by closing, in place.
    pub fn smooth(&mut self, mask: &mut ForegroundMask) {
        self.erode(mask);
        self.dilate(mask);
        self.dilate(mask);
        self.erode(mask);
    }
}

#[inline(always)]
fn combine(op: Op, a: u8, b: u8, c: u8) -> u8 {
    match op {
        Op::Erode => a & b & c,
        Op::Dilate => a | b | c,
    }
}

pub fn erode(mask: &ForegroundMask) -> ForegroundMask {
    let mut m = mask.clone();
    MorphScratch::new().erode(&mut m);
    m
}

pub fn dilate(mask: &ForegroundMask) -> ForegroundMask {
    let mut m = mask.clone();
    MorphScratch::new().dilate(&mut m);
    m
}

/// Erosion then dilation.
pub fn opening(mask: &ForegroundMask) -> ForegroundMask {
    let mut m = mask.clone();
    let mut s = MorphScratch::new();
    s.erode(&mut m);
    s.dilate(&mut m);
    m
}

/// Dilation then erosion.
pub fn closing(mask: &ForegroundMask) -> ForegroundMask {
    let mut m = mask.clone();
    let mut s = MorphScratch::new();
    s.dilate(&mut m);
    s.erode(&mut m);
    m
}

/// Opening followed by closing with a 3x3 square element.
pub fn morph_smooth(mask: &ForegroundMask) -> ForegroundMask {
    let mut m = mask.clone();
    MorphScratch::new().smooth(&mut m);
    m
}
