//! Globally adaptive Simpson quadrature on finite intervals.
//!
//! Every integral over the real line in this crate is taken over a finite
//! window `[-R, R]` whose radius comes from an explicit tail bound of the
//! integrand's density, so the quadrature itself never has to deal with
//! infinite limits.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Panels each piece is split into before adaptation starts. Guards against
/// a single coarse Simpson pair accidentally agreeing on a peaked integrand.
const INITIAL_PANELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub truncation_radius: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(
        truncation_radius: f64,
        abs_tol: f64,
        rel_tol: f64,
        max_subdivisions: usize,
    ) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(truncation_radius) {
            return Err(Error::InvalidInput(format!(
                "truncation radius must be positive, got {truncation_radius}"
            )));
        }
        if !positive(abs_tol) || !positive(rel_tol) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive, got abs {abs_tol}, rel {rel_tol}"
            )));
        }
        if max_subdivisions == 0 {
            return Err(Error::InvalidInput("max_subdivisions must be >= 1".into()));
        }
        Ok(QuadratureSpec {
            truncation_radius,
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    /// Tight default tolerances on `[-radius, radius]`.
    pub fn with_radius(radius: f64) -> Result<Self> {
        Self::new(radius, 1e-14, 1e-12, 500_000)
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    // Quarter points, shared with the two children on bisection.
    fl: f64,
    fr: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Evaluator<F> {
    f: F,
}

impl<F: Fn(f64) -> f64> Evaluator<F> {
    fn eval(&self, x: f64) -> Result<f64> {
        let v = (self.f)(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at: x, value: v })
        }
    }

    fn panel(&self, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Result<Panel> {
        let m = 0.5 * (a + b);
        let fl = self.eval(0.5 * (a + m))?;
        let fr = self.eval(0.5 * (m + b))?;
        let h = b - a;
        let coarse = h / 6.0 * (fa + 4.0 * fm + fb);
        let fine = h / 12.0 * (fa + 4.0 * fl + 2.0 * fm + 4.0 * fr + fb);
        let diff = fine - coarse;
        Ok(Panel {
            a,
            b,
            fa,
            fm,
            fb,
            fl,
            fr,
            value: fine + diff / 15.0,
            error: diff.abs() / 15.0,
        })
    }

    fn split(&self, p: &Panel) -> Result<(Panel, Panel)> {
        let m = 0.5 * (p.a + p.b);
        let left = self.panel(p.a, m, p.fa, p.fl, p.fm)?;
        let right = self.panel(m, p.b, p.fm, p.fr, p.fb)?;
        Ok((left, right))
    }
}

/// Integrates `f` over `[-R, R]` with `R = spec.truncation_radius`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    let r = spec.truncation_radius;
    integrate_pieces(f, &[-r, r], spec)
}

/// Integrates `f` over `[a, b]`.
pub fn integrate_between<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_pieces(f, &[a, b], spec)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, treating every interior
/// break as a panel boundary. Kinks of the integrand should be passed here.
///
/// Breaks must be finite; they are sorted and deduplicated internally. The
/// tolerance `max(abs_tol, rel_tol * |result|)` applies to the whole range.
pub fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut pts: Vec<f64> = breaks.to_vec();
    if pts.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("integration limits must be finite".into()));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Ok(0.0);
    }

    let ev = Evaluator { f };
    let mut heap = BinaryHeap::new();
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / INITIAL_PANELS as f64;
        let mut fa = ev.eval(lo)?;
        for j in 0..INITIAL_PANELS {
            let a = lo + h * j as f64;
            let b = if j + 1 == INITIAL_PANELS { hi } else { lo + h * (j + 1) as f64 };
            let fm = ev.eval(0.5 * (a + b))?;
            let fb = ev.eval(b)?;
            heap.push(ev.panel(a, b, fa, fm, fb)?);
            fa = fb;
        }
    }

    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.error).sum();
    let mut subdivisions = 0usize;
    while err > spec.abs_tol.max(spec.rel_tol * total.abs()) {
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergent {
                subdivisions,
                estimate: total,
                error: err,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let m = 0.5 * (worst.a + worst.b);
        if !(worst.a < m && m < worst.b) {
            // Panel cannot be bisected any further in floating point.
            return Err(Error::NonConvergent {
                subdivisions,
                estimate: total,
                error: err,
            });
        }
        let (l, r) = ev.split(&worst)?;
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        subdivisions += 1;
        if subdivisions.is_multiple_of(4096) {
            // Resynchronize the running sums against drift.
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }

    // Final value summed in position order so the result does not depend on
    // heap layout.
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(neumaier_sum(panels.iter().map(|p| p.value)))
}

/// Compensated summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
