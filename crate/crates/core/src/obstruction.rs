//! Arithmetic and necessary-condition checks for surfaces with several
//! boundary components.

use crate::oracle::DomainSpec;
use serde_json::{json, Value};

/// Least m >= 1 violating the Euler-characteristic bound
/// 2 - 2g + m(k - 2) <= k, or None when no m violates it (k <= 2).
///
/// The bound must hold for every positive m on a genus-g surface whose
/// boundary has k components carrying a commuting pair, so a finite m rules
/// the pair out; for k >= 3 a violation always exists.
pub fn euler_min_violation(genus: u64, boundary_components: u64) -> Option<u64> {
    let g = genus as i128;
    let k = boundary_components as i128;
    let violated = |m: i128| 2 - 2 * g + m * (k - 2) > k;
    if k <= 2 {
        // k <= 2 makes the left side nonincreasing in m; violation possible
        // only at m = 1 (and only for g < ... never for g >= 0)
        return if violated(1) { Some(1) } else { None };
    }
    // least m with m > (k - 2 + 2g)/(k - 2)
    let num = k - 2 + 2 * g;
    let den = k - 2;
    let mut m = num / den + 1;
    if m < 1 {
        m = 1;
    }
    debug_assert!(violated(m) && !violated(m - 1));
    Some(m as u64)
}

/// Component-length report of the equal-length (isospectrality) necessary
/// condition: circles are Laplace-isospectral exactly when their lengths agree.
#[derive(Debug, Clone)]
pub struct LengthReport {
    pub component_lengths: Vec<f64>,
    pub equal: bool,
    pub rel_tol: f64,
}

impl LengthReport {
    pub fn to_json(&self) -> Value {
        json!({
            "component_lengths": self.component_lengths,
            "equal": self.equal,
            "rel_tol": self.rel_tol,
        })
    }
}

/// True iff all boundary component arclengths agree within rel_tol (relative
/// to the longest component). Single-component domains pass vacuously.
pub fn equal_length_check(domain: &DomainSpec, rel_tol: f64) -> LengthReport {
    let component_lengths: Vec<f64> = domain.components().map(|c| c.arclength()).collect();
    let max = component_lengths.iter().cloned().fold(0.0, f64::max);
    let min = component_lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let equal = component_lengths.len() <= 1 || (max - min) <= rel_tol * max;
    LengthReport { component_lengths, equal, rel_tol }
}
