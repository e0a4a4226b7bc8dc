//! Discrete spectral measures parametrizing positive ancient solutions.
//!
//! A measure is a finite list of atoms `(s, xi, w)` on `[0, inf) x S^{n-1}`.
//! Each atom induces the ancient solution `w * exp(t s + sqrt(s) x.xi)`, and
//! the measure induces their sum. The Widder parametrization writes the same
//! solutions as `w * exp(x.y + t |y|^2)`; the two are related by
//! `y = sqrt(s) xi`.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|xi| = 1`.
pub const UNIT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralAtom {
    pub s: f64,
    pub xi: Vec<f64>,
    pub w: f64,
}

impl SpectralAtom {
    pub fn new(s: f64, xi: Vec<f64>, w: f64) -> Self {
        Self { s, xi, w }
    }

    /// `sqrt(s) * xi`, the Widder frequency of this atom.
    pub fn frequency(&self) -> Vec<f64> {
        let r = self.s.sqrt();
        self.xi.iter().map(|c| r * c).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub dim: usize,
    pub atoms: Vec<SpectralAtom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidderAtom {
    pub y: Vec<f64>,
    pub w: f64,
}

/// Which invariant an atom (or the measure) failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    ZeroDimension,
    NegativeS,
    NonPositiveWeight,
    NonFinite,
    DirectionLength,
    NotUnit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// `None` for measure-level violations.
    pub atom: Option<usize>,
    pub rule: Rule,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.atom {
            Some(i) => write!(f, "atom {i}: {:?} ({})", self.rule, self.detail),
            None => write!(f, "measure: {:?} ({})", self.rule, self.detail),
        }
    }
}

impl SpectralMeasure {
    pub fn new(dim: usize, atoms: Vec<SpectralAtom>) -> Self {
        Self { dim, atoms }
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, atoms: Vec::new() }
    }

    /// The measure of `c` (a single atom at `s = 0`).
    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, vec![SpectralAtom::new(0.0, basis_vector(dim), c)])
    }

    /// Total mass `sum w_j`, which equals `u(0, 0)`.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// Checks every type invariant and returns all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.dim == 0 {
            out.push(Violation {
                atom: None,
                rule: Rule::ZeroDimension,
                detail: "dim must be at least 1".into(),
            });
        }
        for (i, a) in self.atoms.iter().enumerate() {
            let mut push = |rule, detail: String| {
                out.push(Violation { atom: Some(i), rule, detail })
            };
            if !a.s.is_finite() || !a.w.is_finite() || a.xi.iter().any(|c| !c.is_finite()) {
                push(Rule::NonFinite, "non-finite component".into());
                continue;
            }
            if a.s < 0.0 {
                push(Rule::NegativeS, format!("s = {} < 0", a.s));
            }
            if a.w <= 0.0 {
                push(Rule::NonPositiveWeight, format!("w = {} <= 0", a.w));
            }
            if a.xi.len() != self.dim {
                push(
                    Rule::DirectionLength,
                    format!("xi has length {}, dim is {}", a.xi.len(), self.dim),
                );
                continue;
            }
            let norm = a.xi.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_TOLERANCE {
                push(Rule::NotUnit, format!("|xi| = {norm}"));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Errors with the first violation, if any.
    pub fn ensure_valid(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidInput(v.to_string())),
        }
    }

    /// Inverse of [`widder_to_spectral`]: `y = sqrt(s) xi`.
    pub fn to_widder(&self) -> Vec<WidderAtom> {
        self.atoms
            .iter()
            .map(|a| WidderAtom { y: a.frequency(), w: a.w })
            .collect()
    }

    /// Sorted list of distinct spectral parameters carrying mass.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.atoms.iter().map(|a| a.s).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    }

    /// Random valid measure: `s` uniform in `[0, s_max]`, `xi` uniform on the
    /// sphere, `w` uniform in `(0.1, 2]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, atoms: usize, s_max: f64) -> Self {
        let atoms = (0..atoms)
            .map(|_| {
                let s = rng.random_range(0.0..=s_max);
                let xi = random_unit(rng, dim);
                let w = rng.random_range(0.1..=2.0);
                SpectralAtom::new(s, xi, w)
            })
            .collect();
        Self::new(dim, atoms)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measure serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a measure file. The result is not validated; call [`validate`](Self::validate).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
            .map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json();
        text.push('\n');
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Maps Widder atoms `y` to `(s = |y|^2, xi = y/|y|)`. `y = 0` maps to
/// `s = 0` with `xi = e_1`.
pub fn widder_to_spectral(atoms: &[WidderAtom], dim: usize) -> Result<SpectralMeasure> {
    let atoms = atoms
        .iter()
        .map(|a| {
            if a.y.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: a.y.len() });
            }
            let s: f64 = a.y.iter().map(|c| c * c).sum();
            let xi = if s == 0.0 {
                basis_vector(dim)
            } else {
                let r = s.sqrt();
                a.y.iter().map(|c| c / r).collect()
            };
            Ok(SpectralAtom::new(s, xi, a.w))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralMeasure::new(dim, atoms))
}

/// Evaluates a Widder representation `sum w exp(x.y + t |y|^2)` directly.
pub fn widder_eval(atoms: &[WidderAtom], x: &[f64], t: f64) -> f64 {
    atoms
        .iter()
        .map(|a| {
            let dot: f64 = a.y.iter().zip(x).map(|(y, x)| y * x).sum();
            let sq: f64 = a.y.iter().map(|y| y * y).sum();
            a.w * (dot + t * sq).exp()
        })
        .sum()
}

pub(crate) fn basis_vector(dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    if let Some(first) = e.first_mut() {
        *first = 1.0;
    }
    e
}

/// Uniform direction on `S^{dim-1}` by rejection from the cube.
pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.random_bool(0.5) { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n2: f64 = v.iter().map(|c| c * c).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validate_examples() {
        let ok = SpectralMeasure::new(1, vec![SpectralAtom::new(1.0, vec![1.0], 1.0)]);
        assert!(ok.validate().is_empty());

        let neg = SpectralMeasure::new(1, vec![SpectralAtom::new(-1.0, vec![1.0], 1.0)]);
        let v = neg.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].atom, Some(0));
        assert_eq!(v[0].rule, Rule::NegativeS);

        // 0.6^2 + 0.7^2 = 0.85
        let bad = SpectralMeasure::new(2, vec![SpectralAtom::new(1.0, vec![0.6, 0.7], 1.0)]);
        let v = bad.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::NotUnit);
    }

    #[test]
    fn validate_weight_and_length() {
        let m = SpectralMeasure::new(
            2,
            vec![
                SpectralAtom::new(1.0, vec![1.0, 0.0], 0.0),
                SpectralAtom::new(1.0, vec![1.0], 1.0),
            ],
        );
        let rules: Vec<_> = m.validate().iter().map(|v| (v.atom, v.rule)).collect();
        assert_eq!(
            rules,
            vec![(Some(0), Rule::NonPositiveWeight), (Some(1), Rule::DirectionLength)]
        );
        assert_eq!(SpectralMeasure::empty(0).validate()[0].rule, Rule::ZeroDimension);
    }

    #[test]
    fn widder_examples() {
        let m = widder_to_spectral(&[WidderAtom { y: vec![1.0, 0.0], w: 1.0 }], 2).unwrap();
        assert_eq!(m.atoms, vec![SpectralAtom::new(1.0, vec![1.0, 0.0], 1.0)]);

        let m = widder_to_spectral(&[WidderAtom { y: vec![0.0, 0.0], w: 3.0 }], 2).unwrap();
        assert_eq!(m.atoms, vec![SpectralAtom::new(0.0, vec![1.0, 0.0], 3.0)]);

        let m = widder_to_spectral(&[WidderAtom { y: vec![3.0, 4.0], w: 2.0 }], 2).unwrap();
        assert_eq!(m.atoms[0].s, 25.0);
        assert!((m.atoms[0].xi[0] - 0.6).abs() < 1e-15);
        assert!((m.atoms[0].xi[1] - 0.8).abs() < 1e-15);
        assert_eq!(m.atoms[0].w, 2.0);

        let err = widder_to_spectral(&[WidderAtom { y: vec![1.0], w: 1.0 }], 2).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn spectral_to_widder_examples() {
        let m = SpectralMeasure::new(1, vec![SpectralAtom::new(1.0, vec![1.0], 1.0)]);
        assert_eq!(m.to_widder(), vec![WidderAtom { y: vec![1.0], w: 1.0 }]);
        let m = SpectralMeasure::new(1, vec![SpectralAtom::new(0.0, vec![1.0], 5.0)]);
        assert_eq!(m.to_widder(), vec![WidderAtom { y: vec![0.0], w: 5.0 }]);
        let m = SpectralMeasure::new(2, vec![SpectralAtom::new(4.0, vec![0.0, 1.0], 1.0)]);
        assert_eq!(m.to_widder(), vec![WidderAtom { y: vec![0.0, 2.0], w: 1.0 }]);
    }

    #[test]
    fn missing_dim_names_field() {
        let err = SpectralMeasure::from_json(r#"{"atoms": []}"#).unwrap_err();
        assert!(err.to_string().contains("dim"), "{err}");
    }

    #[test]
    fn random_measures_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dim in 1..=3 {
            let m = SpectralMeasure::random(&mut rng, dim, 100, 4.0);
            assert!(m.validate().is_empty());
        }
    }
}
