//! Uniform-grid discretization of functions on a centered box, fast
//! convolution, ball statistics, and file I/O.
//!
//! Functions live on a uniform grid over the box `[-L/2, L/2)^n` (n = 1 or 2)
//! with the origin on a grid node. Two support semantics exist:
//!
//! * [`Support::Periodic`] — samples of a torus function; convolutions wrap.
//! * [`Support::Compact`] — samples of a compactly supported function
//!   embedded in the box; convolutions zero-pad by the grid's
//!   `padding_factor` before transforming and crop afterwards.
//!
//! Compactly supported *input data* must vanish on the outer band (the
//! outermost 1/16 of each axis end, i.e. `|x_axis| ≥ 7L/16`) to within
//! `1e-12 × max|f|`; [`GridFunction::sample`] enforces this. Operator
//! *outputs* carry the tag for downstream policy decisions (center scans,
//! padding) but are not required to vanish there — the heat flow spreads
//! mass into the band by design. Use
//! [`GridFunction::validate_compact_band`] to re-check the ingestion
//! contract explicitly.

use crate::{Error, Result};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Compact-support band tolerance, relative to `max|f|`.
pub const COMPACT_BAND_TOL: f64 = 1e-12;

/// Support semantics of a grid function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    Periodic,
    Compact,
}

/// Geometry of a uniform grid on the centered box `[-L/2, L/2)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Spatial dimension, 1 or 2.
    pub dim: usize,
    /// Nodes per axis; a power of two.
    pub points_per_axis: usize,
    /// Physical side length `L` of the box.
    pub side: f64,
    /// Zero-padding factor for compact-support semantics (≥ 2 when used).
    pub padding_factor: usize,
}

impl GridSpec {
    pub fn new(
        dim: usize,
        points_per_axis: usize,
        side: f64,
        padding_factor: usize,
    ) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if points_per_axis < 2 || !points_per_axis.is_power_of_two() {
            return Err(Error::NonPowerOfTwo(points_per_axis));
        }
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::BadSideLength(side));
        }
        if padding_factor == 0 {
            return Err(Error::BadPadding(padding_factor));
        }
        Ok(Self {
            dim,
            points_per_axis,
            side,
            padding_factor,
        })
    }

    /// Grid spacing `h = L/N`.
    pub fn h(&self) -> f64 {
        self.side / self.points_per_axis as f64
    }

    /// Total node count `N^n`.
    pub fn node_count(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    /// Coordinate of axis index `i`: `(i - N/2)·h`, so the origin is a node.
    pub fn axis_coord(&self, i: usize) -> f64 {
        (i as f64 - (self.points_per_axis / 2) as f64) * self.h()
    }

    /// Axis indices of a flat (row-major) node index.
    pub fn multi_index(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.points_per_axis, flat % self.points_per_axis],
        }
    }

    /// Flat index of axis indices (second entry ignored in 1-D).
    pub fn flat_index(&self, idx: [usize; 2]) -> usize {
        match self.dim {
            1 => idx[0],
            _ => idx[0] * self.points_per_axis + idx[1],
        }
    }

    /// Physical coordinates of a flat node index.
    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let idx = self.multi_index(flat);
        (0..self.dim).map(|a| self.axis_coord(idx[a])).collect()
    }

    /// The grid this one zero-pads onto in compact mode: `P·N` points per
    /// axis over side `P·L`.
    pub fn padded(&self) -> GridSpec {
        GridSpec {
            dim: self.dim,
            points_per_axis: self.padding_factor * self.points_per_axis,
            side: self.padding_factor as f64 * self.side,
            padding_factor: 1,
        }
    }

    /// Dyadic radius ladder `{2h, 4h, …} ∩ [·, L/4]` used by every ball scan.
    pub fn dyadic_radii(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut r = 2.0 * self.h();
        while r <= self.side / 4.0 + 1e-12 {
            out.push(r);
            r *= 2.0;
        }
        out
    }

    /// Torus (nearest-image) distance between two flat node indices.
    pub fn torus_distance(&self, i: usize, j: usize) -> f64 {
        let (ai, aj) = (self.multi_index(i), self.multi_index(j));
        let mut d2 = 0.0;
        for a in 0..self.dim {
            let mut d = (self.axis_coord(ai[a]) - self.axis_coord(aj[a])).abs();
            d = d.min(self.side - d);
            d2 += d * d;
        }
        d2.sqrt()
    }

    /// Plain Euclidean distance between two flat node indices.
    pub fn euclid_distance(&self, i: usize, j: usize) -> f64 {
        let (ai, aj) = (self.multi_index(i), self.multi_index(j));
        let mut d2 = 0.0;
        for a in 0..self.dim {
            let d = self.axis_coord(ai[a]) - self.axis_coord(aj[a]);
            d2 += d * d;
        }
        d2.sqrt()
    }
}

/// Real-valued samples on a [`GridSpec`] with declared support semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub spec: GridSpec,
    pub support: Support,
    values: Vec<f64>,
}

impl GridFunction {
    /// Wrap raw values, checking length and finiteness only.
    pub fn from_values(spec: GridSpec, support: Support, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.node_count() {
            return Err(Error::ValueLength {
                expected: spec.node_count(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                index: i,
                coords: spec.coords(i),
            });
        }
        Ok(Self {
            spec,
            support,
            values,
        })
    }

    /// Sample a pointwise rule at the node coordinates. Compact-support
    /// samples must additionally vanish on the outer band.
    pub fn sample<F>(spec: GridSpec, support: Support, rule: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let values: Vec<f64> = (0..spec.node_count())
            .map(|i| rule(&spec.coords(i)))
            .collect();
        let f = Self::from_values(spec, support, values)?;
        if support == Support::Compact {
            f.validate_compact_band()?;
        }
        Ok(f)
    }

    /// All-zero function.
    pub fn zeros(spec: GridSpec, support: Support) -> Self {
        Self {
            spec,
            support,
            values: vec![0.0; spec.node_count()],
        }
    }

    /// Discrete delta: `1/h^n` at the origin node, used to extract kernels.
    pub fn delta_at(spec: GridSpec, support: Support, flat: usize) -> Self {
        let mut values = vec![0.0; spec.node_count()];
        values[flat] = 1.0 / spec.h().powi(spec.dim as i32);
        Self {
            spec,
            support,
            values,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Check the compact ingestion contract: `|f| ≤ 1e-12·max|f|` wherever
    /// some axis coordinate satisfies `|x_axis| ≥ 7L/16`.
    pub fn validate_compact_band(&self) -> Result<()> {
        let band = 7.0 * self.spec.side / 16.0 - 1e-12 * self.spec.side;
        let tol = COMPACT_BAND_TOL * self.max_abs();
        for i in 0..self.values.len() {
            let c = self.spec.coords(i);
            if c.iter().any(|x| x.abs() >= band) && self.values[i].abs() > tol {
                return Err(Error::SupportViolation {
                    coords: c,
                    value: self.values[i].abs(),
                });
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `(Σ f² h^n)^{1/2}` — the grid 2-norm with Riemann-sum weights.
    pub fn l2(&self) -> f64 {
        let hn = self.spec.h().powi(self.spec.dim as i32);
        (self.values.iter().map(|v| v * v).sum::<f64>() * hn).sqrt()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, g: F) -> Self {
        Self {
            spec: self.spec,
            support: self.support,
            values: self.values.iter().map(|&v| g(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise combination of two functions on the same grid/support.
    pub fn zip<F: Fn(f64, f64) -> f64>(&self, other: &Self, g: F) -> Result<Self> {
        if self.spec != other.spec || self.support != other.support {
            return Err(Error::SpecMismatch);
        }
        Ok(Self {
            spec: self.spec,
            support: self.support,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| g(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }
}

/// Relative 2-norm difference `‖a − b‖₂ / ‖b‖₂` (plain vector norms).
pub fn rel_l2(a: &GridFunction, b: &GridFunction) -> f64 {
    let num: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.values().iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

// ---------------------------------------------------------------------------
// FFT plumbing (row-major, equal axis sizes, dim ≤ 2)
// ---------------------------------------------------------------------------

fn fft_all_axes(buf: &mut [Complex<f64>], dim: usize, n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    match dim {
        1 => fft.process(buf),
        _ => {
            // rows (contiguous)
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            // columns via transpose — grids are small enough (n ≤ 2048)
            let mut col = vec![Complex::default(); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = buf[i * n + j];
                }
                fft.process(&mut col);
                for i in 0..n {
                    buf[i * n + j] = col[i];
                }
            }
        }
    }
    if inverse {
        let scale = 1.0 / buf.len() as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

/// Discrete circular convolution `c[i] = Σ_j a[j]·b[(i−j) mod N]` over a
/// `dim`-dimensional grid with `n` points per axis (no `h^n` scaling).
pub(crate) fn circular_convolve_raw(a: &[f64], b: &[f64], dim: usize, n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    let mut fa: Vec<Complex<f64>> = a.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut fb: Vec<Complex<f64>> = b.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_all_axes(&mut fa, dim, n, false);
    fft_all_axes(&mut fb, dim, n, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    fft_all_axes(&mut fa, dim, n, true);
    fa.into_iter().map(|v| v.re).collect()
}

/// Apply a real Fourier multiplier `g(k1[, k2])` in place, where `k = 2πm/L`
/// with signed integer frequencies `m ∈ [-N/2, N/2)`.
pub(crate) fn apply_multiplier<G>(values: &[f64], dim: usize, n: usize, side: f64, g: G) -> Vec<f64>
where
    G: Fn(&[f64]) -> f64,
{
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_all_axes(&mut buf, dim, n, false);
    let k_of = |j: usize| -> f64 {
        let m = if j < n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        };
        2.0 * std::f64::consts::PI * m / side
    };
    match dim {
        1 => {
            for (j, v) in buf.iter_mut().enumerate() {
                *v *= g(&[k_of(j)]);
            }
        }
        _ => {
            for j0 in 0..n {
                for j1 in 0..n {
                    buf[j0 * n + j1] *= g(&[k_of(j0), k_of(j1)]);
                }
            }
        }
    }
    fft_all_axes(&mut buf, dim, n, true);
    buf.into_iter().map(|v| v.re).collect()
}

/// Shift an origin-centered array (origin at node `N/2` per axis) so the
/// origin sits at index 0: `out[j] = in[(j + N/2) mod N]` per axis.
pub(crate) fn roll_origin_to_zero(values: &[f64], dim: usize, n: usize) -> Vec<f64> {
    let half = n / 2;
    let mut out = vec![0.0; values.len()];
    match dim {
        1 => {
            for (j, o) in out.iter_mut().enumerate() {
                *o = values[(j + half) % n];
            }
        }
        _ => {
            for j0 in 0..n {
                for j1 in 0..n {
                    out[j0 * n + j1] = values[((j0 + half) % n) * n + (j1 + half) % n];
                }
            }
        }
    }
    out
}

/// Embed box values at the center of a `p`-times larger grid of zeros.
pub(crate) fn pad_center(values: &[f64], dim: usize, n: usize, p: usize) -> Vec<f64> {
    let np = p * n;
    let off = (p - 1) * n / 2;
    let mut out = vec![0.0; np.pow(dim as u32)];
    match dim {
        1 => out[off..off + n].copy_from_slice(values),
        _ => {
            for i0 in 0..n {
                for i1 in 0..n {
                    out[(i0 + off) * np + (i1 + off)] = values[i0 * n + i1];
                }
            }
        }
    }
    out
}

/// Inverse of [`pad_center`]: extract the centered box from a padded grid.
pub(crate) fn crop_center(values: &[f64], dim: usize, n: usize, p: usize) -> Vec<f64> {
    let np = p * n;
    let off = (p - 1) * n / 2;
    match dim {
        1 => values[off..off + n].to_vec(),
        _ => {
            let mut out = vec![0.0; n * n];
            for i0 in 0..n {
                for i1 in 0..n {
                    out[i0 * n + i1] = values[(i0 + off) * np + (i1 + off)];
                }
            }
            out
        }
    }
}

/// Convolution `(f ⊛ kernel)·h^n` with the kernel stored origin-centered.
///
/// Periodic support wraps on the box torus; compact support zero-pads both
/// operands by the grid's `padding_factor`, convolves on the enlarged torus,
/// and crops back (so the kernel's reach is truncated to the box).
pub fn convolve(f: &GridFunction, kernel: &GridFunction) -> Result<GridFunction> {
    if f.spec != kernel.spec || f.support != kernel.support {
        return Err(Error::SpecMismatch);
    }
    let spec = f.spec;
    let (dim, n) = (spec.dim, spec.points_per_axis);
    let hn = spec.h().powi(dim as i32);
    let values = match f.support {
        Support::Periodic => {
            let k0 = roll_origin_to_zero(kernel.values(), dim, n);
            circular_convolve_raw(f.values(), &k0, dim, n)
        }
        Support::Compact => {
            if spec.padding_factor < 2 {
                return Err(Error::BadPadding(spec.padding_factor));
            }
            let p = spec.padding_factor;
            let fp = pad_center(f.values(), dim, n, p);
            let kp = pad_center(kernel.values(), dim, n, p);
            let k0 = roll_origin_to_zero(&kp, dim, p * n);
            let big = circular_convolve_raw(&fp, &k0, dim, p * n);
            crop_center(&big, dim, n, p)
        }
    }
    .into_iter()
    .map(|v| v * hn)
    .collect();
    GridFunction::from_values(spec, f.support, values)
}

/// O(N²) direct-summation oracle for [`convolve`].
pub fn convolve_direct(f: &GridFunction, kernel: &GridFunction) -> Result<GridFunction> {
    if f.spec != kernel.spec || f.support != kernel.support {
        return Err(Error::SpecMismatch);
    }
    let spec = f.spec;
    let (dim, n) = (spec.dim, spec.points_per_axis);
    let hn = spec.h().powi(dim as i32);
    let half = (n / 2) as i64;
    let nn = n as i64;
    // In compact mode the padded-torus convolution equals, on the box, the
    // plain linear convolution truncated to offsets available in the box
    // (padding_factor ≥ 2 pushes wrap images off the crop window).
    let periodic = f.support == Support::Periodic;
    let mut out = vec![0.0; spec.node_count()];
    for (i, o) in out.iter_mut().enumerate() {
        let ia = spec.multi_index(i);
        let mut acc = 0.0;
        for j in 0..spec.node_count() {
            let ja = spec.multi_index(j);
            let mut kidx = [0usize; 2];
            let mut inside = true;
            for a in 0..dim {
                let mut d = ia[a] as i64 - ja[a] as i64; // offset in nodes
                if periodic {
                    d = d.rem_euclid(nn);
                    if d >= half {
                        d -= nn;
                    }
                }
                let k = d + half;
                if k < 0 || k >= nn {
                    inside = false;
                    break;
                }
                kidx[a] = k as usize;
            }
            if inside {
                acc += f.values()[j] * kernel.values()[spec.flat_index(kidx)];
            }
        }
        *o = acc * hn;
    }
    GridFunction::from_values(spec, f.support, out)
}

// ---------------------------------------------------------------------------
// Ball statistics
// ---------------------------------------------------------------------------

/// Discrete Euclidean ball of node offsets `|δ·h| ≤ r` (ties included).
#[derive(Debug, Clone)]
pub struct BallMask {
    pub r: f64,
    /// Per-axis reach in nodes: `⌊r/h⌋`.
    pub reach: i64,
    pub offsets: Vec<[i64; 2]>,
    pub card: usize,
}

impl BallMask {
    pub fn build(spec: &GridSpec, r: f64) -> Result<Self> {
        let h = spec.h();
        let (min, max) = (h, spec.side / 4.0);
        if !(r >= min - 1e-12 && r <= max + 1e-12) {
            return Err(Error::RadiusOutOfRange { r, min, max });
        }
        let m = (r / h + 1e-9).floor() as i64;
        let r2 = (r / h) * (r / h) + 1e-9;
        let mut offsets = Vec::new();
        match spec.dim {
            1 => {
                for d in -m..=m {
                    offsets.push([d, 0]);
                }
            }
            _ => {
                for d0 in -m..=m {
                    for d1 in -m..=m {
                        if (d0 * d0 + d1 * d1) as f64 <= r2 {
                            offsets.push([d0, d1]);
                        }
                    }
                }
            }
        }
        let card = offsets.len();
        Ok(Self {
            r,
            reach: m,
            offsets,
            card,
        })
    }
}

/// Wrapped ball means for every center, via FFT: `(1/card)·Σ_{δ∈mask} f(x+δ)`.
///
/// The circular wrap is exact for periodic data. For compact data the values
/// are meaningful at centers whose ball stays inside the box — the
/// [`interior_centers`] policy every norm estimator applies.
pub fn ball_mean(f: &GridFunction, mask: &BallMask) -> GridFunction {
    let spec = f.spec;
    let (dim, n) = (spec.dim, spec.points_per_axis);
    let mut ker = vec![0.0; spec.node_count()];
    let nn = n as i64;
    for off in &mask.offsets {
        let mut idx = [0usize; 2];
        for a in 0..dim {
            idx[a] = off[a].rem_euclid(nn) as usize;
        }
        ker[spec.flat_index(idx)] += 1.0;
    }
    let conv = circular_convolve_raw(f.values(), &ker, dim, n);
    let card = mask.card as f64;
    GridFunction {
        spec,
        support: f.support,
        values: conv.into_iter().map(|v| v / card).collect(),
    }
}

/// Direct-summation oracle for [`ball_mean`].
pub fn ball_mean_direct(f: &GridFunction, mask: &BallMask) -> GridFunction {
    let spec = f.spec;
    let nn = spec.points_per_axis as i64;
    let mut out = vec![0.0; spec.node_count()];
    for (c, o) in out.iter_mut().enumerate() {
        let ca = spec.multi_index(c);
        let mut acc = 0.0;
        for off in &mask.offsets {
            let mut idx = [0usize; 2];
            for a in 0..spec.dim {
                idx[a] = (ca[a] as i64 + off[a]).rem_euclid(nn) as usize;
            }
            acc += f.values()[spec.flat_index(idx)];
        }
        *o = acc / mask.card as f64;
    }
    GridFunction {
        spec,
        support: f.support,
        values: out,
    }
}

/// Centers whose ball of node-reach `m` lies inside the box: per-axis index
/// in `[m, N-m)`.
pub fn interior_centers(spec: &GridSpec, reach: i64) -> Vec<usize> {
    let n = spec.points_per_axis as i64;
    let ok = |i: usize| -> bool {
        let ia = spec.multi_index(i);
        (0..spec.dim).all(|a| (ia[a] as i64) >= reach && (ia[a] as i64) < n - reach)
    };
    (0..spec.node_count()).filter(|&i| ok(i)).collect()
}

/// Ball-scan center policy: every node for periodic data, interior centers
/// (ball inside the box) for compact data.
pub fn allowed_centers(f: &GridFunction, reach: i64) -> Vec<usize> {
    match f.support {
        Support::Periodic => (0..f.spec.node_count()).collect(),
        Support::Compact => interior_centers(&f.spec, reach),
    }
}

// ---------------------------------------------------------------------------
// MGF1 binary format + CSV export
// ---------------------------------------------------------------------------

const MAGIC: &[u8; 4] = b"MGF1";

/// Write a grid function in the MGF1 binary format:
/// magic `"MGF1"`, u32-LE dimension, per-axis u32-LE sizes, f64-LE spacing,
/// one support byte (0 = periodic, 1 = compact), then row-major f64-LE values.
pub fn write_grid<P: AsRef<Path>>(f: &GridFunction, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(f.spec.dim as u32).to_le_bytes())?;
    for _ in 0..f.spec.dim {
        w.write_all(&(f.spec.points_per_axis as u32).to_le_bytes())?;
    }
    w.write_all(&f.spec.h().to_le_bytes())?;
    let tag: u8 = match f.support {
        Support::Periodic => 0,
        Support::Compact => 1,
    };
    w.write_all(&[tag])?;
    for v in f.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read an MGF1 file. The reconstructed grid uses `side = h·N` and padding
/// factor 2 (the compact-mode default).
pub fn read_grid<P: AsRef<Path>>(path: P) -> Result<GridFunction> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    if r.read_exact(&mut magic).is_err() || &magic != MAGIC {
        return Err(Error::BadMagic);
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf).map_err(|_| Error::BadMagic)?;
    let dim = u32::from_le_bytes(u32buf) as usize;
    if dim == 0 || dim > 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut sizes = Vec::with_capacity(dim);
    for _ in 0..dim {
        r.read_exact(&mut u32buf).map_err(|_| Error::PayloadSize {
            expected: dim,
            found: 0,
        })?;
        sizes.push(u32::from_le_bytes(u32buf) as usize);
    }
    if sizes.iter().any(|&s| s != sizes[0]) {
        return Err(Error::UnsupportedConfiguration(
            "MGF1 axes must have equal sizes".into(),
        ));
    }
    let n = sizes[0];
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NonPowerOfTwo(n));
    }
    let mut f64buf = [0u8; 8];
    r.read_exact(&mut f64buf).map_err(|_| Error::PayloadSize {
        expected: 1,
        found: 0,
    })?;
    let h = f64::from_le_bytes(f64buf);
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::BadSideLength(h));
    }
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag).map_err(|_| Error::PayloadSize {
        expected: 1,
        found: 0,
    })?;
    let support = match tag[0] {
        0 => Support::Periodic,
        1 => Support::Compact,
        other => return Err(Error::BadSupportTag(other)),
    };
    let expected = n.pow(dim as u32);
    let mut values = Vec::with_capacity(expected);
    loop {
        match r.read_exact(&mut f64buf) {
            Ok(()) => values.push(f64::from_le_bytes(f64buf)),
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => break,
            Err(e) => return Err(e.into()),
        }
        if values.len() > expected {
            return Err(Error::PayloadSize {
                expected,
                found: values.len(),
            });
        }
    }
    if values.len() != expected {
        return Err(Error::PayloadSize {
            expected,
            found: values.len(),
        });
    }
    let spec = GridSpec::new(dim, n, h * n as f64, 2)?;
    GridFunction::from_values(spec, support, values)
}

/// CSV export: one `x1[,x2],value` row per node.
pub fn write_csv<P: AsRef<Path>>(f: &GridFunction, path: P) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for i in 0..f.spec.node_count() {
        let c = f.spec.coords(i);
        let coords = c
            .iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(w, "{coords},{}", f.values()[i])?;
    }
    w.flush()?;
    Ok(())
}
