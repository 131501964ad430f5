//! Dense real polynomials with exact derivatives, Taylor shifts and
//! real-root isolation.

/// `coeffs[i]` multiplies `z^i`. Trailing zeros are stripped on construction,
/// so the last coefficient is always the leading one (or the polynomial is
/// identically zero and `coeffs` is empty).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Coefficients of `z -> p(z + h)`.
    pub fn shifted(&self, h: f64) -> Polynomial {
        // Repeated synthetic division (Horner's Taylor shift).
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                c[j] += h * c[j + 1];
            }
        }
        Polynomial::new(c)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        - other.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    /// Adds `c * z^power`.
    pub fn plus_monomial(&self, c: f64, power: usize) -> Polynomial {
        let mut v = self.coeffs.clone();
        if v.len() <= power {
            v.resize(power + 1, 0.0);
        }
        v[power] += c;
        Polynomial::new(v)
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    pub fn root_bound(&self) -> f64 {
        let lead = self.leading();
        if lead == 0.0 {
            return 0.0;
        }
        1.0 + self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }

    /// All distinct real roots in ascending order.
    ///
    /// The critical points of `p` (roots of `p'`, found recursively) split the
    /// line into intervals on which `p` is monotone; each interval holds at
    /// most one root, located by bisection. Roots of even multiplicity are
    /// caught when `p` vanishes at a critical point.
    pub fn real_roots(&self) -> Vec<f64> {
        match self.coeffs.len() {
            0 | 1 => Vec::new(),
            2 => vec![-self.coeffs[0] / self.coeffs[1]],
            _ => {
                let bound = self.root_bound();
                let mut pts = vec![-bound];
                pts.extend(
                    self.derivative()
                        .real_roots()
                        .into_iter()
                        .filter(|r| r.abs() < bound),
                );
                pts.push(bound);
                let tiny = self.zero_threshold(bound);
                let mut roots = Vec::new();
                for w in pts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let (flo, fhi) = (self.eval(lo), self.eval(hi));
                    if flo.abs() <= tiny && lo != -bound {
                        roots.push(lo);
                        continue;
                    }
                    if fhi.abs() <= tiny {
                        continue;
                    }
                    if flo.signum() != fhi.signum() {
                        roots.push(self.bisect(lo, hi, flo));
                    }
                }
                roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
                roots
            }
        }
    }

    /// Values this small are treated as exact zeros at critical points.
    fn zero_threshold(&self, bound: f64) -> f64 {
        let scale: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * bound.powi(i as i32))
            .sum();
        1e-14 * scale.max(f64::MIN_POSITIVE)
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
        let slo = flo.signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = self.eval(mid);
            if fm == 0.0 {
                return mid;
            }
            if fm.signum() == slo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `sup_{t in [lo, hi]} |p(t)|`, evaluated at the endpoints, at the
    /// supplied critical points (roots of `p'`) that fall inside, and on a
    /// uniform grid of `grid` nodes.
    pub fn max_abs_on(&self, lo: f64, hi: f64, critical: &[f64], grid: usize) -> f64 {
        let mut m = self.eval(lo).abs().max(self.eval(hi).abs());
        for &r in critical {
            if r > lo && r < hi {
                m = m.max(self.eval(r).abs());
            }
        }
        if grid >= 2 {
            let step = (hi - lo) / (grid - 1) as f64;
            for i in 1..grid - 1 {
                m = m.max(self.eval(lo + step * i as f64).abs());
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.0, 3.0]);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 24.0);
        assert_eq!(p.derivative().coeffs(), &[-2.0, 0.0, 9.0]);
        assert_eq!(Polynomial::new(vec![0.0, 0.0, -0.5, 0.0]).degree(), 2);
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = Polynomial::new(vec![0.3, -1.0, 0.5, 2.0, -1.0]);
        let q = p.shifted(0.7);
        for z in [-2.0, -0.3, 0.0, 1.1, 3.0] {
            assert!((q.eval(z) - p.eval(z + 0.7)).abs() < 1e-11);
        }
    }

    #[test]
    fn roots_of_product_form() {
        // (z - 1)(z + 2)(z - 3.5) = z^3 - 2.5 z^2 - 5.5 z + 7
        let p = Polynomial::new(vec![7.0, -5.5, -2.5, 1.0]);
        let r = p.real_roots();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-2.0, 1.0, 3.5]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn repeated_and_missing_roots() {
        assert_eq!(Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, -0.5]).real_roots(), vec![0.0]);
        assert!(Polynomial::new(vec![1.0, 0.0, 1.0]).real_roots().is_empty());
        let dbl = Polynomial::new(vec![1.0, -2.0, 1.0]).real_roots();
        assert_eq!(dbl.len(), 1);
        assert!((dbl[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sup_uses_interior_critical_points() {
        let p = Polynomial::new(vec![0.0, 0.0, -1.0]); // -z^2
        let crit = p.derivative().real_roots();
        assert_eq!(p.max_abs_on(-1.0, 0.5, &crit, 0), 1.0);
        let q = Polynomial::new(vec![1.0, 0.0, -1.0]); // 1 - z^2, peak at 0
        let crit = q.derivative().real_roots();
        assert_eq!(q.max_abs_on(-0.5, 0.5, &crit, 0), 1.0);
    }
}
