//! Seeded, deterministic test-function generators with declared space
//! memberships, plus the fixed exemplar functions the verification
//! experiments are calibrated on.
//!
//! Compact-support families are shaped by one shared C∞ window that is 1 on
//! `|x| ≤ 5L/16` and 0 from `7L/16` outward, which keeps every generated
//! function inside the support-band contract of compact grids. Singular
//! families clip their singularity at radius `ρ_reg = mult·h` (value held at
//! `f(ρ_reg)` inside), so refinement sharpens the singularity and the
//! norm-growth signatures the experiments test are preserved.

use crate::grid::{write_grid, GridFunction, GridSpec, Support};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// The eight generator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Exact-mean-zero pairs of windowed Gaussian bumps (smooth, compact).
    SmoothBump,
    /// Mollified ball indicators (bounded, continuous, compact).
    SmoothedIndicator,
    /// `|x−x₀|^{−n/p}` clipped inside `ρ_reg` — Morrey-finite, not `L^p`.
    PowerSingularity,
    /// `log|x−x₀|` clipped — bounded mean oscillation, no vanishing.
    LogSingularity,
    /// `|log|x−x₀||^δ, δ∈(0,1)` clipped — vanishing oscillation, unbounded.
    LogPowerVmo,
    /// Random trigonometric polynomials (smooth, periodic).
    TrigPoly,
    /// Nonnegative sums of Gaussian bumps (potentials, periodic).
    PotentialBumps,
    /// Coefficient fields pinned to `[1/2, 2]` (periodic).
    EllipticCoefficient,
}

pub const ALL_FAMILIES: [Family; 8] = [
    Family::SmoothBump,
    Family::SmoothedIndicator,
    Family::PowerSingularity,
    Family::LogSingularity,
    Family::LogPowerVmo,
    Family::TrigPoly,
    Family::PotentialBumps,
    Family::EllipticCoefficient,
];

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::SmoothBump => "smooth-bump",
            Family::SmoothedIndicator => "smoothed-indicator",
            Family::PowerSingularity => "power-singularity",
            Family::LogSingularity => "log-singularity",
            Family::LogPowerVmo => "log-power-vmo",
            Family::TrigPoly => "trig-poly",
            Family::PotentialBumps => "potential-bumps",
            Family::EllipticCoefficient => "elliptic-coefficient",
        }
    }

    /// Stable index used to derive the per-family RNG stream; independent of
    /// which subset of families a spec requests.
    fn canonical_index(self) -> u64 {
        ALL_FAMILIES.iter().position(|f| *f == self).unwrap() as u64
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_FAMILIES
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// What to generate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub families: Vec<Family>,
    /// Functions per family.
    pub count: usize,
    pub grid: GridSpec,
    /// Clip radius for singular families, in units of `h` (default 2).
    pub rho_reg_mult: f64,
}

impl CorpusSpec {
    pub fn new(seed: u64, families: Vec<Family>, count: usize, grid: GridSpec) -> Self {
        Self {
            seed,
            families,
            count,
            grid,
            rho_reg_mult: 2.0,
        }
    }
}

/// A generated function with its declared (harness-checked, never assumed)
/// memberships.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub id: String,
    pub family: Family,
    pub function: GridFunction,
    pub memberships: Vec<String>,
    pub singular_points: Vec<Vec<f64>>,
    pub parameters: BTreeMap<String, f64>,
}

// ---------------------------------------------------------------------------
// Shared shape functions
// ---------------------------------------------------------------------------

/// C∞ cutoff: 1 on `|x| ≤ 5L/16`, 0 from `7L/16`, glued by
/// `g(1−s)/(g(s)+g(1−s))` with `g(u) = e^{−1/u}`.
pub fn smooth_window(x: f64, l: f64) -> f64 {
    let (a, b) = (5.0 * l / 16.0, 7.0 * l / 16.0);
    let s = ((x.abs() - a) / (b - a)).clamp(0.0, 1.0);
    let g = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let (gs, gi) = (g(s), g(1.0 - s));
    gi / (gs + gi)
}

/// Product window over all axes — vanishes wherever any axis enters the
/// support band.
pub fn window_nd(coords: &[f64], l: f64) -> f64 {
    coords.iter().map(|&x| smooth_window(x, l)).product()
}

fn radial(coords: &[f64], center: &[f64]) -> f64 {
    coords
        .iter()
        .zip(center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// Deterministic exemplars (the calibrated experiment inputs)
// ---------------------------------------------------------------------------

/// Windowed Gaussian `e^{−|x−c|²/(2w²)}·W(x)`, compact.
pub fn windowed_gaussian(spec: GridSpec, center: &[f64], width: f64) -> Result<GridFunction> {
    let l = spec.side;
    let c = center.to_vec();
    GridFunction::sample(spec, Support::Compact, move |x| {
        let r = radial(x, &c);
        (-r * r / (2.0 * width * width)).exp() * window_nd(x, l)
    })
}

/// The reference mean-zero input: windowed bumps at `−1.0` (width `0.7`) and
/// `+1.3` (width `0.9`), the second scaled so the grid sum vanishes exactly.
pub fn dipole(spec: GridSpec) -> Result<GridFunction> {
    let mut c1 = vec![0.0; spec.dim];
    let mut c2 = vec![0.0; spec.dim];
    c1[0] = -1.0;
    c2[0] = 1.3;
    let b1 = windowed_gaussian(spec, &c1, 0.7)?;
    let b2 = windowed_gaussian(spec, &c2, 0.9)?;
    let ratio = b1.values().iter().sum::<f64>() / b2.values().iter().sum::<f64>();
    b1.sub(&b2.scale(ratio))
}

/// `log(max(|x|, ρ))·W`, the bounded-mean-oscillation exemplar; `ρ = mult·h`.
pub fn clipped_log(spec: GridSpec, rho_mult: f64) -> Result<GridFunction> {
    let l = spec.side;
    let rho = rho_mult * spec.h();
    GridFunction::sample(spec, Support::Compact, move |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r.max(rho).ln() * window_nd(x, l)
    })
}

/// `|log(max(|x|, ρ))|^δ·W`, the vanishing-oscillation unbounded exemplar.
pub fn log_power(spec: GridSpec, delta: f64, rho_mult: f64) -> Result<GridFunction> {
    let l = spec.side;
    let rho = rho_mult * spec.h();
    GridFunction::sample(spec, Support::Compact, move |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r.max(rho).ln().abs().powf(delta) * window_nd(x, l)
    })
}

/// `max(|x|, ρ)^{power}·W`, the Morrey-but-not-`L^p` exemplar (use
/// `power = −n/p`).
pub fn power_singularity(spec: GridSpec, power: f64, rho_mult: f64) -> Result<GridFunction> {
    let l = spec.side;
    let rho = rho_mult * spec.h();
    GridFunction::sample(spec, Support::Compact, move |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        r.max(rho).powf(power) * window_nd(x, l)
    })
}

/// `f(x) = x₀` on the torus (seam at the box edge) — the Poincaré probe.
pub fn linear_x(spec: GridSpec) -> Result<GridFunction> {
    GridFunction::sample(spec, Support::Periodic, |x| x[0])
}

// ---------------------------------------------------------------------------
// Seeded generation
// ---------------------------------------------------------------------------

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generate `count` functions for every requested family. The RNG stream for
/// function `k` of a family depends only on `(seed, family, k)`, so corpora
/// are bit-identical across runs and family subsets.
pub fn generate(cs: &CorpusSpec) -> Result<Vec<TestFunction>> {
    if cs.families.is_empty() {
        return Err(Error::EmptyInput("corpus: families"));
    }
    if cs.count == 0 {
        return Err(Error::EmptyInput("corpus: count"));
    }
    if !(cs.rho_reg_mult.is_finite() && cs.rho_reg_mult >= 1.0) {
        return Err(Error::Config(format!(
            "clip radius {}·h below one cell",
            cs.rho_reg_mult
        )));
    }
    let mut out = Vec::with_capacity(cs.families.len() * cs.count);
    for &family in &cs.families {
        for k in 0..cs.count {
            let sub = cs.seed ^ splitmix64(family.canonical_index() * 0x9E37_79B9 + k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(sub);
            out.push(make_one(cs, family, k, &mut rng)?);
        }
    }
    Ok(out)
}

/// Snap a random central location to a grid node (reproducible singular
/// sets: the clip radius is measured from an exact node).
fn random_node_center(spec: &GridSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = spec.points_per_axis;
    (0..spec.dim)
        .map(|_| spec.axis_coord(rng.gen_range(3 * n / 8..5 * n / 8)))
        .collect()
}

fn trig_values(spec: &GridSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    // per-axis modes 1..=4 with 1/m-damped coefficients
    let l = spec.side;
    let mut coeffs = Vec::new();
    for _ in 0..spec.dim {
        let per_axis: Vec<(f64, f64)> = (1..=4)
            .map(|m| {
                (
                    rng.gen_range(-1.0..1.0) / m as f64,
                    rng.gen_range(-1.0..1.0) / m as f64,
                )
            })
            .collect();
        coeffs.push(per_axis);
    }
    (0..spec.node_count())
        .map(|i| {
            let x = spec.coords(i);
            let mut v = 0.0;
            for (a, per_axis) in coeffs.iter().enumerate() {
                for (m, (c, s)) in per_axis.iter().enumerate() {
                    let w = 2.0 * std::f64::consts::PI * (m + 1) as f64 / l;
                    v += c * (w * x[a]).cos() + s * (w * x[a]).sin();
                }
            }
            v
        })
        .collect()
}

fn make_one(
    cs: &CorpusSpec,
    family: Family,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<TestFunction> {
    let spec = cs.grid;
    let l = spec.side;
    let n = spec.dim as f64;
    let rho = cs.rho_reg_mult * spec.h();
    let id = format!("{}-{k:02}", family.name());
    let mut params = BTreeMap::new();
    let (function, memberships, singular_points) = match family {
        Family::SmoothBump => {
            let c1 = rng.gen_range(-l / 4.0..-0.2);
            let c2 = rng.gen_range(0.2..l / 4.0);
            let w1 = rng.gen_range(0.4..1.0);
            let w2 = rng.gen_range(0.4..1.0);
            params.extend([
                ("c1".into(), c1),
                ("c2".into(), c2),
                ("w1".into(), w1),
                ("w2".into(), w2),
            ]);
            let mut v1 = vec![0.0; spec.dim];
            let mut v2 = vec![0.0; spec.dim];
            v1[0] = c1;
            v2[0] = c2;
            let b1 = windowed_gaussian(spec, &v1, w1)?;
            let b2 = windowed_gaussian(spec, &v2, w2)?;
            let ratio = b1.values().iter().sum::<f64>() / b2.values().iter().sum::<f64>();
            let f = b1.sub(&b2.scale(ratio))?;
            (
                f,
                vec![
                    "L^p for every p ≥ 1".into(),
                    "VM^{p,λ} for every admissible (p,λ)".into(),
                    "VMO".into(),
                    "mean zero (exact)".into(),
                ],
                vec![],
            )
        }
        Family::SmoothedIndicator => {
            let c = rng.gen_range(-l / 8.0..l / 8.0);
            let radius = rng.gen_range(0.5..1.5);
            let edge = rng.gen_range(0.3..0.6);
            params.extend([
                ("center".into(), c),
                ("radius".into(), radius),
                ("edge".into(), edge),
            ]);
            let mut cv = vec![0.0; spec.dim];
            cv[0] = c;
            let f = GridFunction::sample(spec, Support::Compact, move |x| {
                let r = radial(x, &cv);
                let s = ((r - radius) / edge).clamp(0.0, 1.0);
                let g = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
                (g(1.0 - s) / (g(s) + g(1.0 - s))) * window_nd(x, l)
            })?;
            (
                f,
                vec![
                    "L^p for every p ≥ 1".into(),
                    "VMO".into(),
                    "0 ≤ f ≤ 1".into(),
                ],
                vec![],
            )
        }
        Family::PowerSingularity => {
            let x0 = random_node_center(&spec, rng);
            let p = 2.0;
            let power = -n / p;
            params.extend([
                ("p".into(), p),
                ("power".into(), power),
                ("rho".into(), rho),
            ]);
            let x0c = x0.clone();
            let f = GridFunction::sample(spec, Support::Compact, move |x| {
                radial(x, &x0c).max(rho).powf(power) * window_nd(x, l)
            })?;
            (
                f,
                vec![
                    "M^{q,λ} for λ = n(1−q/p), q < p = 2".into(),
                    "weak-L^p at p = 2".into(),
                    "not L^2 (norm grows under refinement)".into(),
                ],
                vec![x0],
            )
        }
        Family::LogSingularity => {
            let x0 = random_node_center(&spec, rng);
            params.insert("rho".into(), rho);
            let x0c = x0.clone();
            let f = GridFunction::sample(spec, Support::Compact, move |x| {
                radial(x, &x0c).max(rho).ln() * window_nd(x, l)
            })?;
            (
                f,
                vec!["BMO".into(), "not VMO (modulus does not vanish)".into()],
                vec![x0],
            )
        }
        Family::LogPowerVmo => {
            let x0 = random_node_center(&spec, rng);
            let delta = rng.gen_range(0.3..0.7);
            params.extend([("delta".into(), delta), ("rho".into(), rho)]);
            let x0c = x0.clone();
            let f = GridFunction::sample(spec, Support::Compact, move |x| {
                radial(x, &x0c).max(rho).ln().abs().powf(delta) * window_nd(x, l)
            })?;
            (
                f,
                vec!["VMO".into(), "unbounded (singular at x₀)".into()],
                vec![x0],
            )
        }
        Family::TrigPoly => {
            let vals = trig_values(&spec, rng);
            let f = GridFunction::from_values(spec, Support::Periodic, vals)?;
            (f, vec!["smooth periodic".into(), "VMO".into()], vec![])
        }
        Family::PotentialBumps => {
            let bumps: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| {
                    (
                        rng.gen_range(0.5..2.0),
                        rng.gen_range(-l / 4.0..l / 4.0),
                        rng.gen_range(0.4..1.0),
                    )
                })
                .collect();
            for (i, (a, c, s)) in bumps.iter().enumerate() {
                params.extend([
                    (format!("amp{i}"), *a),
                    (format!("center{i}"), *c),
                    (format!("width{i}"), *s),
                ]);
            }
            let f = GridFunction::sample(spec, Support::Periodic, move |x| {
                bumps
                    .iter()
                    .map(|&(a, c, s)| {
                        let mut cv = vec![0.0; x.len()];
                        cv[0] = c;
                        let r = radial(x, &cv);
                        a * (-r * r / (2.0 * s * s)).exp()
                    })
                    .sum()
            })?;
            (f, vec!["V ≥ 0".into()], vec![])
        }
        Family::EllipticCoefficient => {
            let t = trig_values(&spec, rng);
            let max = t.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let vals = if max == 0.0 {
                vec![1.25; t.len()]
            } else {
                t.iter()
                    .map(|v| (1.25 + 0.75 * (v / max)).clamp(0.5, 2.0))
                    .collect()
            };
            let f = GridFunction::from_values(spec, Support::Periodic, vals)?;
            (
                f,
                vec!["a(x) ∈ [1/2, 2] (uniformly elliptic)".into()],
                vec![],
            )
        }
    };
    Ok(TestFunction {
        id,
        family,
        function,
        memberships,
        singular_points,
        parameters: params,
    })
}

// ---------------------------------------------------------------------------
// Manifest + file output
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub family: Family,
    pub file: String,
    pub memberships: Vec<String>,
    pub singular_points: Vec<Vec<f64>>,
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub count: usize,
    pub rho_reg_mult: f64,
    pub entries: Vec<ManifestEntry>,
}

/// Write every function as `<id>.mgf1` plus a `manifest.json` into `dir`.
pub fn write_corpus(cs: &CorpusSpec, corpus: &[TestFunction], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut entries = Vec::with_capacity(corpus.len());
    for tf in corpus {
        let file = format!("{}.mgf1", tf.id);
        write_grid(&tf.function, dir.join(&file))?;
        entries.push(ManifestEntry {
            id: tf.id.clone(),
            family: tf.family,
            file,
            memberships: tf.memberships.clone(),
            singular_points: tf.singular_points.clone(),
            parameters: tf.parameters.clone(),
        });
    }
    let manifest = Manifest {
        seed: cs.seed,
        count: cs.count,
        rho_reg_mult: cs.rho_reg_mult,
        entries,
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}
