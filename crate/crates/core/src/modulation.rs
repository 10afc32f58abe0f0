//! Constellations, symbol generation, and hard-decision detection.
//!
//! Every constellation is normalized to unit average symbol energy so the
//! transmitted signal has identity second moment, which all MSE formulas
//! assume. Square M-QAM uses per-axis levels {±1, ±3, ...} scaled by
//! 1/sqrt(2(M-1)/3).

use std::sync::LazyLock;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Supported modulation schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

// Per-axis Gray orderings for the in-phase/quadrature level index.
// Bit label of point (i, j) is (gray[i] << bits_per_axis) | gray[j];
// SER only needs a fixed table, and this is the conventional one.
const GRAY2: [usize; 2] = [0, 1];
const GRAY4: [usize; 4] = [0, 1, 3, 2];
const GRAY8: [usize; 8] = [0, 1, 3, 2, 6, 7, 5, 4];

fn square_qam(levels: usize, gray: &[usize]) -> Vec<Complex64> {
    let m = levels * levels;
    // Unit average energy: E|s|^2 = 2(M-1)/3 for unscaled odd-integer levels.
    let scale = 1.0 / (2.0 * (m as f64 - 1.0) / 3.0).sqrt();
    let mut points = vec![Complex64::new(0.0, 0.0); m];
    for (i, &gi) in gray.iter().enumerate() {
        for (j, &gj) in gray.iter().enumerate() {
            let re = (2.0 * i as f64 - (levels as f64 - 1.0)) * scale;
            let im = (2.0 * j as f64 - (levels as f64 - 1.0)) * scale;
            points[(gi << gray.len().trailing_zeros()) | gj] = Complex64::new(re, im);
        }
    }
    points
}

static QPSK: LazyLock<Vec<Complex64>> = LazyLock::new(|| square_qam(2, &GRAY2));
static QAM16: LazyLock<Vec<Complex64>> = LazyLock::new(|| square_qam(4, &GRAY4));
static QAM64: LazyLock<Vec<Complex64>> = LazyLock::new(|| square_qam(8, &GRAY8));

impl Modulation {
    /// Constellation points indexed by bit label.
    pub fn points(&self) -> &'static [Complex64] {
        match self {
            Modulation::Qpsk => &QPSK,
            Modulation::Qam16 => &QAM16,
            Modulation::Qam64 => &QAM64,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Modulation::Qpsk => 4,
            Modulation::Qam16 => 16,
            Modulation::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        match self {
            Modulation::Qpsk => 2,
            Modulation::Qam16 => 4,
            Modulation::Qam64 => 6,
        }
    }

    /// Nearest constellation point in Euclidean distance.
    /// Ties go to the smaller constellation index.
    pub fn nearest(&self, x: Complex64) -> Complex64 {
        let points = self.points();
        let mut best = points[0];
        let mut best_d = (x - points[0]).norm_sqr();
        for &p in &points[1..] {
            let d = (x - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = p;
            }
        }
        best
    }
}

impl std::str::FromStr for Modulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Modulation::Qpsk),
            "16qam" | "qam16" => Ok(Modulation::Qam16),
            "64qam" | "qam64" => Ok(Modulation::Qam64),
            other => Err(Error::InvalidInput(format!(
                "unknown modulation '{other}' (expected qpsk, 16qam, or 64qam)"
            ))),
        }
    }
}

impl std::fmt::Display for Modulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Modulation::Qpsk => write!(f, "qpsk"),
            Modulation::Qam16 => write!(f, "16qam"),
            Modulation::Qam64 => write!(f, "64qam"),
        }
    }
}

/// Draws `n` symbols uniformly from the constellation.
///
/// Consumes exactly one `random_range` call per symbol, in index order.
pub fn gen_symbols_with<R: Rng>(modulation: Modulation, n: usize, rng: &mut R) -> DVector<Complex64> {
    let points = modulation.points();
    DVector::from_fn(n, |_, _| points[rng.random_range(0..points.len())])
}

/// Seeded wrapper around [`gen_symbols_with`]; bit-identical for a fixed seed.
pub fn gen_symbols(modulation: Modulation, n: usize, seed: u64) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_symbols_with(modulation, n, &mut rng)
}

/// Per-entry nearest-point hard decision.
pub fn symbol_detect(x: &DVector<Complex64>, modulation: Modulation) -> DVector<Complex64> {
    x.map(|xi| modulation.nearest(xi))
}

/// Fraction of entries that differ between detected and transmitted symbols.
///
/// Both vectors must hold exact constellation points, so equality is exact.
pub fn ser(detected: &DVector<Complex64>, truth: &DVector<Complex64>) -> Result<f64> {
    if detected.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "detected has {} entries, truth has {}",
            detected.len(),
            truth.len()
        )));
    }
    let errors = detected
        .iter()
        .zip(truth.iter())
        .filter(|(d, t)| d != t)
        .count();
    Ok(errors as f64 / truth.len() as f64)
}
