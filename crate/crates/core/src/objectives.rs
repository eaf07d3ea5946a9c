//! Continuous benchmark objectives (minimization) and a name registry.

use std::fmt;

use crate::error::{Error, Result};

/// Pure evaluator of an objective on a point of matching dimension.
pub type Evaluator = fn(&[f64]) -> f64;

/// An objective bound to a dimension and an axis-aligned box domain.
#[derive(Clone)]
pub struct ObjectiveSpec {
    name: String,
    dimension: usize,
    lower: f64,
    upper: f64,
    evaluator: Evaluator,
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish()
    }
}

impl ObjectiveSpec {
    /// Build an objective outside the registry. The box `[lower, upper]^n`
    /// may be degenerate (`lower == upper`) but not inverted.
    pub fn custom(
        name: impl Into<String>,
        dimension: usize,
        lower: f64,
        upper: f64,
        evaluator: Evaluator,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::config("objective dimension must be at least 1"));
        }
        if !(lower.is_finite() && upper.is_finite()) || lower > upper {
            return Err(Error::config(format!(
                "invalid objective bounds [{lower}, {upper}]"
            )));
        }
        Ok(Self {
            name: name.into(),
            dimension,
            lower,
            upper,
            evaluator,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension && x.iter().all(|v| (self.lower..=self.upper).contains(v))
    }

    /// Evaluate at `x`, rejecting dimension mismatches and non-finite results.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(Error::Objective(format!(
                "{} expects {} coordinates, got {}",
                self.name,
                self.dimension,
                x.len()
            )));
        }
        let value = (self.evaluator)(x);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Objective(format!(
                "{} returned non-finite value {value} at {x:?}",
                self.name
            )))
        }
    }
}

/// Griewangk's function with 1-based `i` inside the cosine term.
pub fn griewangk(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Objective(
            "griewangk needs at least one coordinate".into(),
        ));
    }
    Ok(griewangk_unchecked(x))
}

fn griewangk_unchecked(x: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        sum += xi * xi;
        prod *= (xi / ((i + 1) as f64).sqrt()).cos();
    }
    sum / 4000.0 - prod + 1.0
}

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

struct Entry {
    name: &'static str,
    lower: f64,
    upper: f64,
    evaluator: Evaluator,
}

const REGISTRY: &[Entry] = &[
    Entry {
        name: "griewangk",
        lower: -500.0,
        upper: 500.0,
        evaluator: griewangk_unchecked,
    },
    Entry {
        name: "sphere",
        lower: -100.0,
        upper: 100.0,
        evaluator: sphere,
    },
];

pub fn known_objectives() -> Vec<&'static str> {
    REGISTRY.iter().map(|e| e.name).collect()
}

/// Look up a registered objective by name at dimension `n`.
pub fn lookup(name: &str, n: usize) -> Result<ObjectiveSpec> {
    let entry = REGISTRY
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            Error::config(format!(
                "unknown objective '{name}' (known: {})",
                known_objectives().join(", ")
            ))
        })?;
    ObjectiveSpec::custom(entry.name, n, entry.lower, entry.upper, entry.evaluator)
}
