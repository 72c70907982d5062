//! Adaptive per-pixel Gaussian-mixture background model.
//!
//! One model is kept per visual channel. Each pixel holds `K` weighted
//! Gaussians kept sorted by `weight / sigma` (most probable background
//! first). Each frame either updates the first matching component or
//! replaces the least probable one, and the pixel is foreground unless the
//! matched component lies inside the leading set whose cumulative weight
//! first exceeds the background fraction `T`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::Grid;
use crate::morphology::ForegroundMask;

/// Upper bound on components per pixel.
pub const MAX_COMPONENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// Raw depth; the value 0 means "no reading".
    Depth,
    /// 8-bit luma derived from the color stream.
    Luma,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmParams {
    pub components: usize,
    pub learning_rate: f64,
    /// Matching radius in standard deviations.
    pub match_k: f64,
    pub background_fraction: f64,
    pub initial_variance: f64,
    pub variance_floor: f64,
    /// Weight given to a replacement component before renormalization.
    pub replacement_weight: f64,
}

impl GmmParams {
    pub const fn depth_default() -> Self {
        GmmParams {
            components: 3,
            learning_rate: 0.01,
            match_k: 2.5,
            background_fraction: 0.7,
            initial_variance: 50.0 * 50.0,
            variance_floor: 4.0,
            replacement_weight: 0.05,
        }
    }

    pub const fn luma_default() -> Self {
        GmmParams { initial_variance: 30.0 * 30.0, ..Self::depth_default() }
    }

    pub const fn for_channel(kind: ChannelKind) -> Self {
        match kind {
            ChannelKind::Depth => Self::depth_default(),
            ChannelKind::Luma => Self::luma_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_open_unit = |v: f64| v > 0.0 && v < 1.0;
        if !(1..=MAX_COMPONENTS).contains(&self.components) {
            return Err(Error::InvalidParameter("component count out of range"));
        }
        if !in_open_unit(self.learning_rate) {
            return Err(Error::InvalidParameter("learning rate out of range"));
        }
        if !(self.match_k > 0.0 && self.match_k.is_finite()) {
            return Err(Error::InvalidParameter("match_k out of range"));
        }
        if !(self.background_fraction > 0.0 && self.background_fraction <= 1.0) {
            return Err(Error::InvalidParameter("background fraction out of range"));
        }
        if !(self.variance_floor > 0.0 && self.variance_floor.is_finite()) {
            return Err(Error::InvalidParameter("variance floor out of range"));
        }
        if !(self.initial_variance >= self.variance_floor && self.initial_variance.is_finite()) {
            return Err(Error::InvalidParameter("initial variance below variance floor"));
        }
        if !in_open_unit(self.replacement_weight) {
            return Err(Error::InvalidParameter("replacement weight out of range"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Per-pixel mixtures over an ROI-sized grid.
#[derive(Debug, Clone)]
pub struct BackgroundModel {
    width: usize,
    height: usize,
    kind: ChannelKind,
    params: GmmParams,
    components: Vec<GaussianComponent>,
    observed: Vec<bool>,
}

/// Pixel sample types a model can consume.
pub trait Sample: Copy + Send + Sync {
    fn value(self) -> f64;
}

impl Sample for u16 {
    #[inline]
    fn value(self) -> f64 {
        self as f64
    }
}

impl Sample for f64 {
    #[inline]
    fn value(self) -> f64 {
        self
    }
}

impl Sample for u8 {
    #[inline]
    fn value(self) -> f64 {
        self as f64
    }
}

impl BackgroundModel {
    /// Builds a model whose every pixel holds one component centred on the
    /// first observation. Depth pixels with no reading are flagged as never
    /// observed and initialize on their first valid value.
    pub fn new<P: Sample>(kind: ChannelKind, params: GmmParams, first: &Grid<P>) -> Result<Self> {
        params.validate()?;
        let (width, height) = first.dims();
        let k = params.components;
        let mut components = vec![
            GaussianComponent { weight: 0.0, mean: 0.0, variance: params.initial_variance };
            width * height * k
        ];
        let mut observed = vec![false; width * height];
        for ((mix, seen), &p) in components
            .chunks_exact_mut(k)
            .zip(observed.iter_mut())
            .zip(first.as_slice())
        {
            let x = p.value();
            mix[0] = GaussianComponent { weight: 1.0, mean: x, variance: params.initial_variance };
            *seen = !(kind == ChannelKind::Depth && x == 0.0);
        }
        Ok(BackgroundModel { width, height, kind, params, components, observed })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn params(&self) -> &GmmParams {
        &self.params
    }

    /// The ordered mixture of pixel `(x, y)`.
    pub fn mixture(&self, x: usize, y: usize) -> &[GaussianComponent] {
        let k = self.params.components;
        let start = (y * self.width + x) * k;
        &self.components[start..start + k]
    }

    /// False until the pixel has seen a valid reading.
    pub fn observed(&self, x: usize, y: usize) -> bool {
        self.observed[y * self.width + x]
    }

    pub fn update_and_classify<P: Sample>(&mut self, frame: &Grid<P>) -> Result<ForegroundMask> {
        let mut mask = ForegroundMask::empty(self.width, self.height);
        self.update_into(frame, &mut mask)?;
        Ok(mask)
    }

    /// Updates every pixel with `frame` and writes the classification into
    /// `mask` (resized if needed).
    pub fn update_into<P: Sample>(&mut self, frame: &Grid<P>, mask: &mut ForegroundMask) -> Result<()> {
        if frame.dims() != (self.width, self.height) {
            return Err(Error::DimensionMismatch {
                expected: (self.width, self.height),
                found: frame.dims(),
            });
        }
        mask.reset(self.width, self.height);
        let kernel = Kernel::new(&self.params, self.kind);
        let k = self.params.components;
        let w = self.width;
        if w == 0 || self.height == 0 {
            return Ok(());
        }

        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            self.components
                .par_chunks_mut(w * k)
                .zip(self.observed.par_chunks_mut(w))
                .zip(frame.as_slice().par_chunks(w))
                .zip(mask.as_mut_slice().par_chunks_mut(w))
                .for_each(|(((mix, seen), src), out)| kernel.run_row(mix, seen, src, out));
        }
        #[cfg(not(feature = "parallel"))]
        {
            for (((mix, seen), src), out) in self
                .components
                .chunks_exact_mut(w * k)
                .zip(self.observed.chunks_exact_mut(w))
                .zip(frame.as_slice().chunks_exact(w))
                .zip(mask.as_mut_slice().chunks_exact_mut(w))
            {
                kernel.run_row(mix, seen, src, out);
            }
        }
        Ok(())
    }
}

/// Per-pixel update, independent of every other pixel.
#[derive(Clone, Copy)]
struct Kernel {
    k: usize,
    alpha: f64,
    match_k2: f64,
    background_fraction: f64,
    initial_variance: f64,
    variance_floor: f64,
    replacement_weight: f64,
    zero_is_missing: bool,
}

impl Kernel {
    fn new(p: &GmmParams, kind: ChannelKind) -> Self {
        Kernel {
            k: p.components,
            alpha: p.learning_rate,
            match_k2: p.match_k * p.match_k,
            background_fraction: p.background_fraction,
            initial_variance: p.initial_variance,
            variance_floor: p.variance_floor,
            replacement_weight: p.replacement_weight,
            zero_is_missing: kind == ChannelKind::Depth,
        }
    }

    #[inline]
    fn run_row<P: Sample>(&self, mix: &mut [GaussianComponent], seen: &mut [bool], src: &[P], out: &mut [u8]) {
        for (((m, s), &p), o) in mix.chunks_exact_mut(self.k).zip(seen).zip(src).zip(out) {
            *o = self.update_pixel(m, s, p.value()) as u8;
        }
    }

    /// Returns true when the pixel is foreground.
    #[inline]
    fn update_pixel(&self, mix: &mut [GaussianComponent], seen: &mut bool, x: f64) -> bool {
        if self.zero_is_missing && x == 0.0 {
            return false;
        }
        if !*seen {
            *seen = true;
            mix[0] = GaussianComponent { weight: 1.0, mean: x, variance: self.initial_variance };
            for c in &mut mix[1..] {
                c.weight = 0.0;
            }
            return false;
        }

        let alpha = self.alpha;
        let matched = mix.iter().position(|c| {
            let d = x - c.mean;
            c.weight > 0.0 && d * d <= self.match_k2 * c.variance
        });

        let tracked = match matched {
            Some(m) => {
                for c in mix.iter_mut() {
                    c.weight *= 1.0 - alpha;
                }
                let c = &mut mix[m];
                c.weight += alpha;
                let rho = (alpha / c.weight).clamp(alpha, 1.0);
                c.mean = (1.0 - rho) * c.mean + rho * x;
                let d = x - c.mean;
                c.variance = ((1.0 - rho) * c.variance + rho * d * d).max(self.variance_floor);
                m
            }
            None => {
                let last = self.k - 1;
                mix[last] = GaussianComponent {
                    weight: self.replacement_weight,
                    mean: x,
                    variance: self.initial_variance,
                };
                last
            }
        };

        let total: f64 = mix.iter().map(|c| c.weight).sum();
        for c in mix.iter_mut() {
            c.weight /= total;
        }

        let rank = sort_by_fitness(mix, tracked);
        if matched.is_none() {
            return true;
        }

        let mut cumulative = 0.0;
        let mut background = self.k;
        for (i, c) in mix.iter().enumerate() {
            cumulative += c.weight;
            if cumulative > self.background_fraction {
                background = i + 1;
                break;
            }
        }
        rank >= background
    }
}

/// Stable insertion sort by `weight / sqrt(variance)` descending; returns
/// the new position of the component that was at `tracked`.
#[inline]
fn sort_by_fitness(mix: &mut [GaussianComponent], mut tracked: usize) -> usize {
    // a ranks before b iff a.w / sqrt(a.var) > b.w / sqrt(b.var)
    let before = |a: &GaussianComponent, b: &GaussianComponent| {
        a.weight * a.weight * b.variance > b.weight * b.weight * a.variance
    };
    for i in 1..mix.len() {
        let mut j = i;
        while j > 0 && before(&mix[j], &mix[j - 1]) {
            mix.swap(j, j - 1);
            if tracked == j {
                tracked = j - 1;
            } else if tracked == j - 1 {
                tracked = j;
            }
            j -= 1;
        }
    }
    tracked
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant<P: Copy>(w: usize, h: usize, v: P) -> Grid<P> {
        Grid::filled(w, h, v)
    }

    #[test]
    fn new_model_centres_first_component() {
        let p = GmmParams::depth_default();
        let m = BackgroundModel::new(ChannelKind::Depth, p, &constant(4, 3, 1000u16)).unwrap();
        for y in 0..3 {
            for x in 0..4 {
                let mix = m.mixture(x, y);
                assert_eq!(mix.len(), 3);
                assert_eq!(mix[0], GaussianComponent { weight: 1.0, mean: 1000.0, variance: 2500.0 });
                assert!(mix[1..].iter().all(|c| c.weight == 0.0));
                assert!(m.observed(x, y));
            }
        }
    }

    #[test]
    fn missing_depth_pixel_is_flagged_and_stays_background() {
        let mut g = constant(3, 3, 800u16);
        g.set(1, 1, 0);
        let mut m = BackgroundModel::new(ChannelKind::Depth, GmmParams::depth_default(), &g).unwrap();
        assert!(!m.observed(1, 1));
        assert_eq!(m.mixture(1, 1)[0].mean, 0.0);

        // still no reading: background, untouched
        let mask = m.update_and_classify(&g).unwrap();
        assert_eq!(mask.get(1, 1), 0);
        assert!(!m.observed(1, 1));

        // first valid reading initializes the pixel and is background
        let mut g2 = g.clone();
        g2.set(1, 1, 1500);
        let mask = m.update_and_classify(&g2).unwrap();
        assert_eq!(mask.get(1, 1), 0);
        assert!(m.observed(1, 1));
        assert_eq!(m.mixture(1, 1)[0].mean, 1500.0);

        // a dropout on an observed pixel skips the update
        let before = m.mixture(0, 0).to_vec();
        let mut g3 = g2.clone();
        g3.set(0, 0, 0);
        let mask = m.update_and_classify(&g3).unwrap();
        assert_eq!(mask.get(0, 0), 0);
        assert_eq!(m.mixture(0, 0), &before[..]);
    }

    #[test]
    fn zero_luma_is_a_real_value() {
        let m = BackgroundModel::new(ChannelKind::Luma, GmmParams::luma_default(), &constant(2, 2, 0u8)).unwrap();
        assert!(m.observed(0, 0));
    }

    #[test]
    fn parameter_validation() {
        let first = constant(2, 2, 10u16);
        let bad = GmmParams { learning_rate: 0.0, ..GmmParams::depth_default() };
        assert_eq!(
            BackgroundModel::new(ChannelKind::Depth, bad, &first).unwrap_err(),
            Error::InvalidParameter("learning rate out of range")
        );
        let bad = GmmParams { learning_rate: 1.0, ..GmmParams::depth_default() };
        assert!(bad.validate().is_err());
        let bad = GmmParams { background_fraction: 0.0, ..GmmParams::depth_default() };
        assert!(bad.validate().is_err());
        let bad = GmmParams { components: 0, ..GmmParams::depth_default() };
        assert!(bad.validate().is_err());
        let bad = GmmParams { initial_variance: 1.0, ..GmmParams::depth_default() };
        assert!(bad.validate().is_err());
        assert!(GmmParams { background_fraction: 1.0, ..GmmParams::depth_default() }.validate().is_ok());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let mut m = BackgroundModel::new(ChannelKind::Luma, GmmParams::luma_default(), &constant(4, 4, 9u8)).unwrap();
        assert!(matches!(
            m.update_and_classify(&constant(4, 5, 9u8)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constant_input_is_a_fixed_point() {
        let v = 1234u16;
        let g = constant(8, 8, v);
        let mut m = BackgroundModel::new(ChannelKind::Depth, GmmParams::depth_default(), &g).unwrap();
        let mut mask = ForegroundMask::empty(8, 8);
        for _ in 0..500 {
            m.update_into(&g, &mut mask).unwrap();
        }
        assert_eq!(mask.count(), 0);
        let top = m.mixture(3, 3)[0];
        assert_eq!(top.mean, v as f64);
        assert_eq!(top.weight, 1.0);
    }

    #[test]
    fn large_step_after_convergence_is_all_foreground() {
        let p = GmmParams::depth_default();
        let v = 1000.0;
        let g = constant(6, 6, v);
        let mut m = BackgroundModel::new(ChannelKind::Depth, p, &g).unwrap();
        for _ in 0..500 {
            m.update_and_classify(&g).unwrap();
        }
        let far = constant(6, 6, v + 100.0 * libm::sqrt(p.initial_variance));
        let mask = m.update_and_classify(&far).unwrap();
        assert_eq!(mask.count(), 36);
    }

    #[test]
    fn sort_tracks_moved_component() {
        let c = |w: f64, v: f64| GaussianComponent { weight: w, mean: 0.0, variance: v };
        let mut mix = [c(0.1, 4.0), c(0.8, 4.0), c(0.1, 100.0)];
        let r = sort_by_fitness(&mut mix, 1);
        assert_eq!(r, 0);
        assert_eq!(mix[0].weight, 0.8);
        assert_eq!(mix[2].variance, 100.0);
        let r = sort_by_fitness(&mut mix, 2);
        assert_eq!(r, 2);
    }

    #[test]
    fn replacement_happens_at_lowest_rank() {
        let g = constant(1, 1, 500u16);
        let mut m = BackgroundModel::new(ChannelKind::Depth, GmmParams::depth_default(), &g).unwrap();
        let far = constant(1, 1, 1500u16);
        assert_eq!(m.update_and_classify(&far).unwrap().count(), 1);
        let mix = m.mixture(0, 0);
        assert!((mix[0].weight - 1.0 / 1.05).abs() < 1e-12);
        assert_eq!(mix[0].mean, 500.0);
        assert_eq!(mix[1].mean, 1500.0);
        assert!((mix[1].weight - 0.05 / 1.05).abs() < 1e-12);
        assert_eq!(mix[2].weight, 0.0);
    }
}
