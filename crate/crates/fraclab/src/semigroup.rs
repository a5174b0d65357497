//! Concrete realizations of the evolution semigroup `e^{-tL}`, kernel-matrix
//! extraction, and fitting of the Gaussian upper bound
//! `|P_t(x,y)| ≤ C·t^{-n/2}·e^{-A|x-y|²/t}`.
//!
//! Three backends are provided:
//!
//! * **heat** — `L = -Δ` as the Fourier multiplier `e^{-t|k|²}` on torus
//!   frequencies `k = 2πm/L`; in compact mode the input is zero-padded by the
//!   grid's padding factor, evolved on the enlarged torus, and cropped.
//! * **schrodinger** — `L = -Δ + V` with `V ≥ 0`, via Strang splitting:
//!   `m` substeps of (half potential step, full heat step, half potential
//!   step), second-order accurate in `t/m`.
//! * **divform** — `L = -(a·u')'` in 1-D periodic mode, `0 < λ ≤ a ≤ Λ`,
//!   via dense symmetric eigendecomposition of the flux-form
//!   finite-difference matrix (exact to eigensolver precision).
//!
//! ## Splitting resolution
//!
//! Splitting substeps must stay spectrally resolved: for substep `dt = t/m`
//! the per-substep heat multiplier at the Nyquist frequency is
//! `e^{-dt(π/h)²}`, and once `dt ≲ h²` that factor is O(1), so Gibbs ringing
//! from the truncated frequency band survives each substep and — scattered
//! by the potential factors — breaks the entrywise positivity of the kernel
//! at the `1e-10` level. Choose `m` so that `t/m ≳ 2.5·h²` when kernel
//! positivity or entrywise domination matters.

use crate::grid::{apply_multiplier, crop_center, pad_center, GridFunction, GridSpec, Support};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Dense-matrix budget: kernel matrices are refused above this node count.
pub const DENSE_BUDGET: usize = 4096;

/// Relative noise floor for bound fits: kernel entries below
/// `1e-9 × max|P_t|` are frequency-truncation ringing, not kernel values.
pub const FIT_NOISE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
enum Backend {
    Heat,
    Schrodinger {
        potential: GridFunction,
        substeps: usize,
    },
    DivForm {
        eigenvalues: DVector<f64>,
        eigenvectors: DMatrix<f64>,
    },
}

/// An evolution backend exposing `apply(t, f) ≈ e^{-tL} f`.
#[derive(Debug, Clone)]
pub struct Semigroup {
    pub spec: GridSpec,
    pub support: Support,
    backend: Backend,
}

impl Semigroup {
    /// The free heat semigroup on the given grid.
    pub fn heat(spec: GridSpec, support: Support) -> Self {
        Self {
            spec,
            support,
            backend: Backend::Heat,
        }
    }

    /// `e^{-t(-Δ+V)}` by Strang splitting with `substeps` steps per apply.
    /// The potential must be nonnegative everywhere.
    pub fn schrodinger(potential: GridFunction, substeps: usize) -> Result<Self> {
        let min_v = potential
            .values()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_v < 0.0 {
            return Err(Error::NegativePotential(min_v));
        }
        if substeps == 0 {
            return Err(Error::Config("splitting needs at least one substep".into()));
        }
        Ok(Self {
            spec: potential.spec,
            support: potential.support,
            backend: Backend::Schrodinger {
                potential,
                substeps,
            },
        })
    }

    /// `e^{-tL}` for `L u = -(a·u')'` (1-D, periodic), via dense symmetric
    /// eigendecomposition. The coefficient is sampled at the grid nodes and
    /// averaged onto half-nodes; it must satisfy `lower ≤ a ≤ upper` with
    /// `lower > 0`.
    pub fn divform(coefficient: GridFunction, lower: f64, upper: f64) -> Result<Self> {
        let spec = coefficient.spec;
        if spec.dim != 1 {
            return Err(Error::UnsupportedConfiguration(
                "divergence-form backend is 1-D only".into(),
            ));
        }
        if coefficient.support != Support::Periodic {
            return Err(Error::UnsupportedConfiguration(
                "divergence-form backend is periodic-only".into(),
            ));
        }
        if spec.node_count() > DENSE_BUDGET {
            return Err(Error::BudgetExceeded {
                nodes: spec.node_count(),
                budget: DENSE_BUDGET,
            });
        }
        if !(lower > 0.0 && lower <= upper) {
            return Err(Error::Config(format!(
                "ellipticity bounds [{lower}, {upper}] invalid"
            )));
        }
        let a = coefficient.values();
        for (i, &v) in a.iter().enumerate() {
            if !(v >= lower && v <= upper) {
                return Err(Error::EllipticityViolation {
                    index: i,
                    value: v,
                    lower,
                    upper,
                });
            }
        }
        let n = spec.points_per_axis;
        let h2 = spec.h() * spec.h();
        // a_{i+1/2} = (a_i + a_{i+1})/2, periodic wrap; flux form
        // (L u)_i = -(a_{i+1/2}(u_{i+1}-u_i) - a_{i-1/2}(u_i-u_{i-1}))/h².
        let half = |i: usize| 0.5 * (a[i] + a[(i + 1) % n]);
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let (ap, am) = (half(i), half((i + n - 1) % n));
            m[(i, i)] = (ap + am) / h2;
            m[(i, (i + 1) % n)] -= ap / h2;
            m[(i, (i + n - 1) % n)] -= am / h2;
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        Ok(Self {
            spec,
            support: Support::Periodic,
            backend: Backend::DivForm {
                eigenvalues: eig.eigenvalues,
                eigenvectors: eig.eigenvectors,
            },
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.backend {
            Backend::Heat => "heat",
            Backend::Schrodinger { .. } => "schrodinger",
            Backend::DivForm { .. } => "divform",
        }
    }

    /// Smallest potential value (schrodinger backend), used by the
    /// fractional-integral divergence checks.
    pub fn min_potential(&self) -> Option<f64> {
        match &self.backend {
            Backend::Schrodinger { potential, .. } => Some(
                potential
                    .values()
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min),
            ),
            _ => None,
        }
    }

    /// Whether the backend conserves constants (`e^{-tL}1 = 1`).
    pub fn conserves_constants(&self) -> bool {
        match &self.backend {
            Backend::Heat | Backend::DivForm { .. } => true,
            Backend::Schrodinger { potential, .. } => potential.max_abs() == 0.0,
        }
    }

    /// Evaluate `e^{-tL} f`.
    pub fn apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        if f.spec != self.spec || f.support != self.support {
            return Err(Error::SpecMismatch);
        }
        if t == 0.0 {
            return Ok(f.clone());
        }
        match &self.backend {
            Backend::Heat => self.heat_apply(t, f),
            Backend::Schrodinger {
                potential,
                substeps,
            } => self.splitting_apply(t, f, potential, *substeps),
            Backend::DivForm {
                eigenvalues,
                eigenvectors,
            } => {
                let v = DVector::from_column_slice(f.values());
                let mut w = eigenvectors.transpose() * v;
                for (wi, lam) in w.iter_mut().zip(eigenvalues.iter()) {
                    *wi *= (-t * lam).exp();
                }
                let out = eigenvectors * w;
                GridFunction::from_values(self.spec, self.support, out.data.into())
            }
        }
    }

    fn heat_apply(&self, t: f64, f: &GridFunction) -> Result<GridFunction> {
        let (dim, n) = (self.spec.dim, self.spec.points_per_axis);
        let values = match self.support {
            Support::Periodic => heat_values(f.values(), dim, n, self.spec.side, t),
            Support::Compact => {
                let p = self.spec.padding_factor;
                if p < 2 {
                    return Err(Error::BadPadding(p));
                }
                let fp = pad_center(f.values(), dim, n, p);
                let gp = heat_values(&fp, dim, p * n, p as f64 * self.spec.side, t);
                crop_center(&gp, dim, n, p)
            }
        };
        GridFunction::from_values(self.spec, self.support, values)
    }

    fn splitting_apply(
        &self,
        t: f64,
        f: &GridFunction,
        potential: &GridFunction,
        substeps: usize,
    ) -> Result<GridFunction> {
        let (dim, n) = (self.spec.dim, self.spec.points_per_axis);
        let dt = t / substeps as f64;
        let step = |values: &mut Vec<f64>, v: &[f64], n_axis: usize, side: f64| {
            let half: Vec<f64> = v.iter().map(|&q| (-0.5 * dt * q).exp()).collect();
            for _ in 0..substeps {
                for (x, hf) in values.iter_mut().zip(&half) {
                    *x *= hf;
                }
                *values = heat_values(values, dim, n_axis, side, dt);
                for (x, hf) in values.iter_mut().zip(&half) {
                    *x *= hf;
                }
            }
        };
        let values = match self.support {
            Support::Periodic => {
                let mut vals = f.values().to_vec();
                step(&mut vals, potential.values(), n, self.spec.side);
                vals
            }
            Support::Compact => {
                let p = self.spec.padding_factor;
                if p < 2 {
                    return Err(Error::BadPadding(p));
                }
                let mut vals = pad_center(f.values(), dim, n, p);
                let vp = pad_center(potential.values(), dim, n, p);
                step(&mut vals, &vp, p * n, p as f64 * self.spec.side);
                crop_center(&vals, dim, n, p)
            }
        };
        GridFunction::from_values(self.spec, self.support, values)
    }
}

fn heat_values(values: &[f64], dim: usize, n: usize, side: f64, t: f64) -> Vec<f64> {
    apply_multiplier(values, dim, n, side, |k| {
        (-t * k.iter().map(|ki| ki * ki).sum::<f64>()).exp()
    })
}

// ---------------------------------------------------------------------------
// Kernel matrices
// ---------------------------------------------------------------------------

/// Dense kernel `P_t(x_i, y_j)` extracted column-by-column from a backend.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub t: f64,
    pub spec: GridSpec,
    pub support: Support,
    pub provenance: String,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn from_entries(
        t: f64,
        spec: GridSpec,
        support: Support,
        provenance: String,
        entries: Vec<f64>,
    ) -> Result<Self> {
        let n = spec.node_count();
        if entries.len() != n * n {
            return Err(Error::ValueLength {
                expected: n * n,
                found: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                index: i,
                coords: vec![],
            });
        }
        Ok(Self {
            t,
            spec,
            support,
            provenance,
            entries,
        })
    }

    /// Number of nodes (the matrix is `len × len`).
    pub fn len(&self) -> usize {
        self.spec.node_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.len() + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation from symmetry, relative to the largest entry.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.entry(i, j) - self.entry(j, i)).abs());
            }
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Reconstruction `Σ_j P(x_i, y_j) f(y_j) h^n` — must reproduce `apply`.
    pub fn apply_to(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.spec != self.spec || f.support != self.support {
            return Err(Error::SpecMismatch);
        }
        let n = self.len();
        let hn = self.spec.h().powi(self.spec.dim as i32);
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.entries[i * n..(i + 1) * n];
            *o = row.iter().zip(f.values()).map(|(p, v)| p * v).sum::<f64>() * hn;
        }
        GridFunction::from_values(self.spec, self.support, out)
    }

    /// Export as an MGF1 2-D grid of side `len × len`.
    pub fn write_mgf1<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let mspec = GridSpec::new(2, self.len(), self.len() as f64 * self.spec.h(), 1)?;
        let g = GridFunction::from_values(mspec, Support::Periodic, self.entries.clone())?;
        crate::grid::write_grid(&g, path)
    }

    /// Export as `i,j,value` CSV triplets.
    pub fn write_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        use std::io::Write;
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                writeln!(w, "{i},{j},{}", self.entry(i, j))?;
            }
        }
        Ok(())
    }
}

/// Extract the dense kernel of `e^{-tL}`: column `j` is `apply(t, δ_j)/h^n`
/// with `δ_j` the unit impulse at node `j`. Translation-invariant backends
/// take a circulant fast path (one column).
pub fn kernel_matrix(op: &Semigroup, t: f64) -> Result<KernelMatrix> {
    let spec = op.spec;
    let n = spec.node_count();
    if n > DENSE_BUDGET {
        return Err(Error::BudgetExceeded {
            nodes: n,
            budget: DENSE_BUDGET,
        });
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::UnsupportedConfiguration(format!(
            "kernel extraction needs t > 0, got {t}"
        )));
    }
    let provenance = match &op.backend {
        Backend::Heat => "heat".to_string(),
        Backend::Schrodinger { substeps, .. } => format!("schrodinger(m={substeps})"),
        Backend::DivForm { .. } => "divform".to_string(),
    };
    let entries = match (&op.backend, op.support) {
        (Backend::Heat, Support::Periodic) => {
            let origin = origin_flat(&spec);
            let col = op.apply(t, &GridFunction::delta_at(spec, op.support, origin))?;
            circulant_expand(&spec, col.values())
        }
        (Backend::Heat, Support::Compact) => {
            // Heat is translation invariant on the padded torus; build its
            // delta column there once and index by padded offset.
            let pspec = spec.padded();
            let ph = Semigroup::heat(pspec, Support::Periodic);
            let col = ph.apply(
                t,
                &GridFunction::delta_at(pspec, Support::Periodic, origin_flat(&pspec)),
            )?;
            padded_circulant_expand(&spec, col.values())
        }
        (
            Backend::DivForm {
                eigenvalues,
                eigenvectors,
            },
            _,
        ) => {
            // P = Q·e^{-tΛ}·Qᵀ / h
            let mut scaled = eigenvectors.clone();
            for (c, lam) in eigenvalues.iter().enumerate() {
                let factor = (-t * lam).exp();
                scaled.column_mut(c).scale_mut(factor);
            }
            let p = scaled * eigenvectors.transpose() / spec.h();
            p.transpose().data.into()
        }
        _ => {
            let nodes = spec.node_count();
            let mut entries = vec![0.0; nodes * nodes];
            for j in 0..nodes {
                let col = op.apply(t, &GridFunction::delta_at(spec, op.support, j))?;
                for (i, v) in col.values().iter().enumerate() {
                    entries[i * nodes + j] = *v;
                }
            }
            entries
        }
    };
    KernelMatrix::from_entries(t, spec, op.support, provenance, entries)
}

fn origin_flat(spec: &GridSpec) -> usize {
    let half = spec.points_per_axis / 2;
    spec.flat_index([half, half])
}

/// Expand a delta column `col[i] = P(x_i, 0)` into the full circulant
/// matrix on the periodic box.
pub(crate) fn circulant_expand(spec: &GridSpec, col: &[f64]) -> Vec<f64> {
    let n = spec.points_per_axis;
    let nodes = spec.node_count();
    let half = n / 2;
    let mut out = vec![0.0; nodes * nodes];
    for i in 0..nodes {
        let ia = spec.multi_index(i);
        for j in 0..nodes {
            let ja = spec.multi_index(j);
            let mut idx = [0usize; 2];
            for a in 0..spec.dim {
                idx[a] = (ia[a] + n + half - ja[a]) % n;
            }
            out[i * nodes + j] = col[spec.flat_index(idx)];
        }
    }
    out
}

/// Expand a padded-torus delta column into the box kernel matrix:
/// `P(x_i, x_j) = col[(i - j) + PN/2]` per axis (offsets never wrap since
/// box offsets stay below the padded half-width).
pub(crate) fn padded_circulant_expand(spec: &GridSpec, col: &[f64]) -> Vec<f64> {
    let n = spec.points_per_axis;
    let np = spec.padding_factor * n;
    let nodes = spec.node_count();
    let half = np / 2;
    let pspec = spec.padded();
    let mut out = vec![0.0; nodes * nodes];
    for i in 0..nodes {
        let ia = spec.multi_index(i);
        for j in 0..nodes {
            let ja = spec.multi_index(j);
            let mut idx = [0usize; 2];
            for a in 0..spec.dim {
                idx[a] = (ia[a] + np + half - ja[a]) % np;
            }
            out[i * nodes + j] = col[pspec.flat_index(idx)];
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Gaussian bound fit
// ---------------------------------------------------------------------------

/// Witness of the pair attaining the fitted constant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundArgmax {
    pub t: f64,
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub entry: f64,
}

/// Result of fitting `C` in `|P_t(x,y)| ≤ C·t^{-n/2}·e^{-A|x-y|²/t}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianBoundFit {
    pub a_rate: f64,
    pub c_fit: f64,
    pub t_list: Vec<f64>,
    pub argmax: Option<BoundArgmax>,
    pub pairs_scanned: usize,
}

/// Fit the minimal Gaussian-bound prefactor over the scanned kernels.
///
/// Scan policy (all data-derived, recorded here once):
/// * periodic: torus distance, pairs with `d ≤ L/4`;
/// * compact: plain distance, both points inside the inner half-box
///   (`|x_axis| ≤ L/4`) — box-cropped kernels lose mass near the edge;
/// * entries below `1e-9 × max|P_t|` are excluded (truncation ringing), and
///   with them distances beyond `√(4t·ln 1e9)` where even an exact Gaussian
///   sits below that floor.
pub fn gaussian_bound_fit(kernels: &[KernelMatrix], a_rate: f64) -> Result<GaussianBoundFit> {
    if kernels.is_empty() {
        return Err(Error::EmptyInput(
            "gaussian_bound_fit needs at least one kernel",
        ));
    }
    if !(a_rate.is_finite() && a_rate > 0.0) {
        return Err(Error::Config(format!(
            "decay rate A = {a_rate} must be positive"
        )));
    }
    let mut best: f64 = f64::NEG_INFINITY;
    let mut argmax = None;
    let mut pairs = 0usize;
    for k in kernels {
        let spec = k.spec;
        let ndim = spec.dim as f64;
        let lquarter = spec.side / 4.0;
        let floor = FIT_NOISE_FLOOR * k.max_abs();
        let dcap = (4.0 * k.t * (1e9f64).ln()).sqrt();
        let nodes = k.len();
        let half_box = |i: usize| spec.coords(i).iter().all(|x| x.abs() <= lquarter + 1e-12);
        for i in 0..nodes {
            if k.support == Support::Compact && !half_box(i) {
                continue;
            }
            for j in 0..nodes {
                let p = k.entry(i, j).abs();
                if p <= floor {
                    continue;
                }
                let d = match k.support {
                    Support::Periodic => spec.torus_distance(i, j),
                    Support::Compact => {
                        if !half_box(j) {
                            continue;
                        }
                        spec.euclid_distance(i, j)
                    }
                };
                if d > lquarter + 1e-12 || d > dcap {
                    continue;
                }
                pairs += 1;
                let cand = p.ln() + 0.5 * ndim * k.t.ln() + a_rate * d * d / k.t;
                if cand > best {
                    best = cand;
                    argmax = Some(BoundArgmax {
                        t: k.t,
                        i,
                        j,
                        distance: d,
                        entry: k.entry(i, j),
                    });
                }
            }
        }
    }
    let c_fit = if pairs == 0 { 0.0 } else { best.exp() };
    Ok(GaussianBoundFit {
        a_rate,
        c_fit,
        t_list: kernels.iter().map(|k| k.t).collect(),
        argmax,
        pairs_scanned: pairs,
    })
}

/// Largest entrywise excess of `sub` over `dominating`
/// (`max_{i,j} sub(i,j) − dom(i,j)`), for domination checks.
pub fn domination_excess(sub: &KernelMatrix, dominating: &KernelMatrix) -> Result<f64> {
    if sub.len() != dominating.len() || sub.spec != dominating.spec {
        return Err(Error::SpecMismatch);
    }
    Ok(sub
        .entries()
        .iter()
        .zip(dominating.entries())
        .map(|(s, d)| s - d)
        .fold(f64::NEG_INFINITY, f64::max))
}

// ---------------------------------------------------------------------------
// Dense matrix-exponential oracle
// ---------------------------------------------------------------------------

/// Dense matrix of the spectral Laplacian `-Δ` (the same operator the heat
/// multiplier applies), symmetrized against roundoff. 1-D periodic only;
/// used as the generator of the matrix-exponential oracle.
pub fn spectral_laplacian_matrix(spec: &GridSpec) -> Result<DMatrix<f64>> {
    if spec.dim != 1 {
        return Err(Error::UnsupportedDimension(spec.dim));
    }
    let n = spec.points_per_axis;
    if n > DENSE_BUDGET {
        return Err(Error::BudgetExceeded {
            nodes: n,
            budget: DENSE_BUDGET,
        });
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = apply_multiplier(&e, 1, n, spec.side, |k| k[0] * k[0]);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    // symmetrize: the multiplier is self-adjoint, FFT roundoff is not
    let mt = m.transpose();
    Ok((m + mt) * 0.5)
}

/// Oracle for the Schrödinger backend: `e^{-t(-Δ+V)} f` by dense symmetric
/// eigendecomposition of the exact discrete generator (spectral Laplacian
/// plus diagonal potential). Periodic 1-D, small `N` only.
pub fn expm_oracle(potential: &GridFunction, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if potential.spec != f.spec || potential.support != f.support {
        return Err(Error::SpecMismatch);
    }
    if f.support != Support::Periodic {
        return Err(Error::UnsupportedConfiguration(
            "matrix-exponential oracle is periodic-only".into(),
        ));
    }
    let mut m = spectral_laplacian_matrix(&f.spec)?;
    for (i, v) in potential.values().iter().enumerate() {
        m[(i, i)] += v;
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let w = eig.eigenvectors.transpose() * DVector::from_column_slice(f.values());
    let scaled = DVector::from_iterator(
        w.len(),
        w.iter()
            .zip(eig.eigenvalues.iter())
            .map(|(wi, lam)| wi * (-t * lam).exp()),
    );
    let out = eig.eigenvectors * scaled;
    GridFunction::from_values(f.spec, f.support, out.data.into())
}
