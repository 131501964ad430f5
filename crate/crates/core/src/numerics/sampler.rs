//! Inverse-CDF sampling from a tabulated density.
//!
//! The table is a strictly increasing piecewise-linear map from (0, 1) onto
//! `[-R, R]`. Its knots sit at equal probability steps `j / N`; the two end
//! segments, which carry the extremes, are further split at geometrically
//! shrinking tail probabilities so the largest draws of a long run are not
//! spread uniformly over the whole tail.

use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 1 << 14;

/// Largest admissible probability mass outside `[-R, R]`.
pub const MAX_TAIL_MASS: f64 = 1e-12;

/// Smallest tail probability that still gets its own knot.
const TAIL_FLOOR: f64 = 1e-14;

// 4-point Gauss-Legendre on [-1, 1].
const GL_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Fine-grid numeric CDF on `[-R, R]`, normalized to total mass one.
#[derive(Debug, Clone)]
struct NumericCdf {
    lo: f64,
    h: f64,
    /// `left[i]` is the mass left of cell `i`.
    left: Vec<f64>,
    /// `right[i]` is the mass right of the lower edge of cell `i`.
    right: Vec<f64>,
}

impl NumericCdf {
    fn build<F: Fn(f64) -> f64>(log_density: &F, radius: f64, cells: usize) -> Result<Self> {
        let lo = -radius;
        let h = 2.0 * radius / cells as f64;
        let mut mass = Vec::with_capacity(cells);
        for i in 0..cells {
            let mid = lo + h * (i as f64 + 0.5);
            let m: f64 = GL_NODES
                .iter()
                .zip(GL_WEIGHTS)
                .map(|(t, w)| w * log_density(mid + 0.5 * h * t).exp())
                .sum::<f64>()
                * 0.5
                * h;
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::NonMonotoneCdf { at: mid });
            }
            mass.push(m);
        }
        let mut left = vec![0.0; cells + 1];
        for i in 0..cells {
            left[i + 1] = left[i] + mass[i];
        }
        let mut right = vec![0.0; cells + 1];
        for i in (0..cells).rev() {
            right[i] = right[i + 1] + mass[i];
        }
        let total = left[cells];
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::NonMonotoneCdf { at: 0.0 });
        }
        left.iter_mut().for_each(|v| *v /= total);
        right.iter_mut().for_each(|v| *v /= total);
        Ok(NumericCdf { lo, h, left, right })
    }

    fn cells(&self) -> usize {
        self.left.len() - 1
    }

    fn cdf(&self, z: f64) -> f64 {
        let t = (z - self.lo) / self.h;
        if t <= 0.0 {
            return 0.0;
        }
        let i = t as usize;
        if i >= self.cells() {
            return 1.0;
        }
        let frac = t - i as f64;
        self.left[i] + frac * (self.left[i + 1] - self.left[i])
    }

    /// Quantile for lower-tail probability `p`.
    fn quantile_left(&self, p: f64) -> f64 {
        let i = self.left.partition_point(|&v| v <= p).saturating_sub(1);
        let i = i.min(self.cells() - 1);
        let width = self.left[i + 1] - self.left[i];
        let frac = if width > 0.0 { (p - self.left[i]) / width } else { 0.0 };
        self.lo + self.h * (i as f64 + frac.clamp(0.0, 1.0))
    }

    /// Quantile for upper-tail probability `s`.
    fn quantile_right(&self, s: f64) -> f64 {
        // `right` is decreasing; find the cell whose [right[i+1], right[i]] holds s.
        let i = self.right.partition_point(|&v| v > s).saturating_sub(1);
        let i = i.min(self.cells() - 1);
        let width = self.right[i] - self.right[i + 1];
        let frac = if width > 0.0 { (self.right[i] - s) / width } else { 1.0 };
        self.lo + self.h * (i as f64 + frac.clamp(0.0, 1.0))
    }
}

#[derive(Debug, Clone)]
pub struct SamplerTable {
    radius: f64,
    grid_points: usize,
    /// Knots at probabilities `j / N`, `j = 0..=N`.
    body: Vec<f64>,
    /// `(p, z)` knots of the first segment, ascending in `p`.
    lower_tail: Vec<(f64, f64)>,
    /// `(1 - p, z)` knots of the last segment, ascending in `1 - p`.
    upper_tail: Vec<(f64, f64)>,
    cdf: NumericCdf,
}

/// Builds the table for the density `exp(log_density)` on `[-radius, radius]`.
///
/// `tail_mass` is an upper bound on the density's mass outside the window;
/// the build is refused when it exceeds [`MAX_TAIL_MASS`].
pub fn build_inverse_cdf_table<F: Fn(f64) -> f64>(
    log_density: F,
    radius: f64,
    grid_points: usize,
    tail_mass: f64,
) -> Result<SamplerTable> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    if grid_points < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 grid points, got {grid_points}")));
    }
    if !(tail_mass <= MAX_TAIL_MASS) {
        return Err(Error::InsufficientTailRadius {
            bound: tail_mass,
            limit: MAX_TAIL_MASS,
        });
    }
    let cells = (16 * grid_points).max(1 << 16);
    let cdf = NumericCdf::build(&log_density, radius, cells)?;
    let n = grid_points;

    let mut body = Vec::with_capacity(n + 1);
    body.push(-radius);
    for j in 1..n {
        let z = if 2 * j <= n {
            cdf.quantile_left(j as f64 / n as f64)
        } else {
            cdf.quantile_right((n - j) as f64 / n as f64)
        };
        body.push(z);
    }
    body.push(radius);

    let step = 1.0 / n as f64;
    let mut lower_tail = vec![(step, body[1])];
    let mut upper_tail = vec![(step, body[n - 1])];
    let mut p = step * 0.5;
    while p >= TAIL_FLOOR {
        lower_tail.push((p, cdf.quantile_left(p)));
        upper_tail.push((p, cdf.quantile_right(p)));
        p *= 0.5;
    }
    lower_tail.push((0.0, -radius));
    upper_tail.push((0.0, radius));
    lower_tail.reverse();
    upper_tail.reverse();

    let table = SamplerTable {
        radius,
        grid_points,
        body,
        lower_tail,
        upper_tail,
        cdf,
    };
    table.check_monotone()?;
    Ok(table)
}

impl SamplerTable {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn grid_points(&self) -> usize {
        self.grid_points
    }

    /// Equal-probability knots `z_j` at `p = j / N`.
    pub fn knots(&self) -> &[f64] {
        &self.body
    }

    /// Numeric CDF the table was inverted from.
    pub fn cdf(&self, z: f64) -> f64 {
        self.cdf.cdf(z)
    }

    /// Maps `u` in (0, 1) to a draw.
    #[inline]
    pub fn sample(&self, u: f64) -> f64 {
        let n = self.grid_points as f64;
        let t = u * n;
        if t < 1.0 {
            interpolate(&self.lower_tail, u)
        } else if t >= n - 1.0 {
            let s = 1.0 - u;
            // Upper-tail knots run in survival order, i.e. decreasing z.
            interpolate(&self.upper_tail, s)
        } else {
            let j = t as usize;
            let frac = t - j as f64;
            let (a, b) = (self.body[j], self.body[j + 1]);
            a + frac * (b - a)
        }
    }

    fn check_monotone(&self) -> Result<()> {
        let mut all: Vec<f64> = self.lower_tail.iter().map(|&(_, z)| z).collect();
        all.extend_from_slice(&self.body[2..self.grid_points - 1]);
        all.extend(self.upper_tail.iter().rev().map(|&(_, z)| z));
        for w in all.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::NonMonotoneCdf { at: w[0] });
            }
        }
        Ok(())
    }
}

/// Linear interpolation on `(x, y)` knots ascending in `x`.
fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let i = knots
        .partition_point(|&(kx, _)| kx <= x)
        .clamp(1, knots.len() - 1);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    y0 + (x - x0) / (x1 - x0) * (y1 - y0)
}
