//! Incremental Gaussian elimination for linear equations over reals.
//!
//! The solved form maps each pivot unknown to an expression over non-pivot
//! unknowns. A new equation is reduced by substitution; what remains is
//! either redundant, contradictory, or yields a new pivot (the unknown with
//! the largest coefficient), which is then eliminated from existing rows.

use std::collections::BTreeMap;

use crate::store::UnknownId;

/// Coefficients at or below this fraction of the largest one are dropped.
pub const PIVOT_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for deciding that a residual `0 = c` holds.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Row {
    pub terms: BTreeMap<UnknownId, f64>,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RealSolver {
    rows: BTreeMap<UnknownId, Row>,
}

/// The equation contradicts the solved form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inconsistent;

impl RealSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `Σ terms + constant = 0`.
    pub fn add(&mut self, terms: &BTreeMap<UnknownId, f64>, constant: f64) -> Result<(), Inconsistent> {
        let mut eq = Row { terms: BTreeMap::new(), constant };
        let mut scale = constant.abs();
        for (&u, &a) in terms {
            match self.rows.get(&u) {
                Some(row) => {
                    eq.constant += a * row.constant;
                    scale = scale.max((a * row.constant).abs());
                    for (&v, &b) in &row.terms {
                        *eq.terms.entry(v).or_insert(0.0) += a * b;
                    }
                }
                None => *eq.terms.entry(u).or_insert(0.0) += a,
            }
        }
        let largest = eq.terms.values().fold(0.0f64, |m, c| m.max(c.abs()));
        eq.terms.retain(|_, c| c.abs() > PIVOT_TOLERANCE * largest && *c != 0.0);
        scale = scale.max(largest);
        let Some((&pivot, &p)) = eq.terms.iter().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())) else {
            return if eq.constant.abs() <= RESIDUAL_TOLERANCE * (1.0 + scale) {
                Ok(())
            } else {
                Err(Inconsistent)
            };
        };
        // pivot = -(Σ others + constant) / p
        let mut row = Row { terms: BTreeMap::new(), constant: -eq.constant / p };
        for (&v, &c) in &eq.terms {
            if v != pivot {
                row.terms.insert(v, -c / p);
            }
        }
        for existing in self.rows.values_mut() {
            if let Some(a) = existing.terms.remove(&pivot) {
                existing.constant += a * row.constant;
                for (&v, &b) in &row.terms {
                    *existing.terms.entry(v).or_insert(0.0) += a * b;
                }
                let largest = existing.terms.values().fold(0.0f64, |m, c| m.max(c.abs()));
                existing.terms.retain(|_, c| c.abs() > PIVOT_TOLERANCE * largest && *c != 0.0);
            }
        }
        self.rows.insert(pivot, row);
        Ok(())
    }

    /// The value of `u` if the solved form fixes it.
    pub fn value(&self, u: UnknownId) -> Option<f64> {
        self.rows.get(&u).filter(|r| r.terms.is_empty()).map(|r| r.constant)
    }

    pub fn rows(&self) -> &BTreeMap<UnknownId, Row> {
        &self.rows
    }
}
