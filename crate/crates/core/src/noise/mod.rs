//! Exponential-polynomial noise densities `q(z) = exp(psi(z)) / A`.
//!
//! `psi` is a real polynomial of even degree `2n` with a negative leading
//! coefficient `b_{2n} = -a_{2n}`. Construction validates the polynomial,
//! finds a truncation radius `R` from an explicit tail bound, and then
//! computes the normalizer, the Fisher information and a sampler table by
//! quadrature on `[-R, R]`. Everything is immutable afterwards.

mod audit;

pub use audit::{audit_assumptions, AuditReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    build_inverse_cdf_table, integrate_pieces, Polynomial, QuadratureSpec, RandomStream,
    SamplerTable, DEFAULT_GRID_POINTS, MAX_TAIL_MASS,
};

/// Log-scale margin below the peak of `psi` that the provisional
/// normalization window must reach.
const PROVISIONAL_LOG_MARGIN: f64 = 60.0;

#[derive(Debug, Clone)]
pub struct ExpPolyNoise {
    psi: Polynomial,
    d1: Polynomial,
    d2: Polynomial,
    d3: Polynomial,
    half_degree: usize,
    /// `a_{2n} = -b_{2n} > 0`.
    lead: f64,
    validity_radius: f64,
    log_normalizer: f64,
    fisher_info: f64,
    truncation_radius: f64,
    sampler: SamplerTable,
}

/// Plain-data view of a constructed noise model.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NoiseSummary {
    pub psi_coeffs: Vec<f64>,
    pub degree: usize,
    pub log_normalizer: f64,
    pub normalizer: f64,
    pub fisher_information: f64,
    pub truncation_radius: f64,
    pub validity_radius: f64,
}

/// Parses `"b0,b1,...,bm"`.
pub fn parse_coefficients(s: &str) -> Result<Vec<f64>> {
    let coeffs = s
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad polynomial coefficient {tok:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if coeffs.is_empty() {
        return Err(Error::InvalidInput("empty coefficient list".into()));
    }
    Ok(coeffs)
}

impl ExpPolyNoise {
    /// Builds the density from raw `psi` coefficients `b_0..b_m`
    /// (lowest order first).
    pub fn new(psi_coeffs: &[f64]) -> Result<Self> {
        if psi_coeffs.is_empty() {
            return Err(Error::InvalidInput("psi needs at least one coefficient".into()));
        }
        if let Some(c) = psi_coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite coefficient {c}")));
        }
        let psi = Polynomial::new(psi_coeffs.to_vec());
        let degree = psi.degree();
        if degree % 2 == 1 {
            return Err(Error::OddDegree { degree });
        }
        if degree < 2 {
            return Err(Error::DegreeTooLow { degree });
        }
        let b_lead = psi.leading();
        if b_lead >= 0.0 {
            return Err(Error::NonNegativeLeadingCoefficient {
                coefficient: b_lead,
            });
        }
        let lead = -b_lead;
        let half_degree = degree / 2;
        let d1 = psi.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();

        let validity_radius = sandwich_radius(&psi, lead, degree);
        let stationary = d1.real_roots();
        let psi_max = stationary
            .iter()
            .map(|&z| psi.eval(z))
            .fold(f64::NEG_INFINITY, f64::max);

        // Provisional window: beyond it psi <= -a/2 |z|^{2n} <= psi_max - margin.
        let reach = (2.0 * (PROVISIONAL_LOG_MARGIN - psi_max).max(0.0) / lead)
            .powf(1.0 / degree as f64);
        let provisional = validity_radius.max(reach).max(1.0);
        let log_a0 = log_integral_exp(&psi, psi_max, provisional, &stationary)?;

        let truncation_radius =
            truncation_radius_for(validity_radius, |t| log_tail_bound(t, half_degree, lead, log_a0))?;
        let log_normalizer = log_integral_exp(&psi, psi_max, truncation_radius, &stationary)?;

        let spec = QuadratureSpec::with_radius(truncation_radius)?;
        let breaks = window_breaks(truncation_radius, &stationary);
        let fisher_info = integrate_pieces(
            |z| {
                let g = d1.eval(z);
                g * g * (psi.eval(z) - log_normalizer).exp()
            },
            &breaks,
            &spec,
        )?;

        let tail = log_tail_bound(truncation_radius, half_degree, lead, log_normalizer).exp();
        let sampler = build_inverse_cdf_table(
            |z| psi.eval(z) - log_normalizer,
            truncation_radius,
            DEFAULT_GRID_POINTS,
            tail,
        )?;

        Ok(ExpPolyNoise {
            psi,
            d1,
            d2,
            d3,
            half_degree,
            lead,
            validity_radius,
            log_normalizer,
            fisher_info,
            truncation_radius,
            sampler,
        })
    }

    /// Unit-variance Gaussian, `psi(z) = -z^2 / 2`.
    pub fn gaussian() -> Self {
        Self::new(&[0.0, 0.0, -0.5]).expect("gaussian noise is valid")
    }

    pub fn psi_coeffs(&self) -> &[f64] {
        self.psi.coeffs()
    }

    pub fn degree(&self) -> usize {
        2 * self.half_degree
    }

    /// `n`, half the degree of `psi`.
    pub fn half_degree(&self) -> usize {
        self.half_degree
    }

    /// `a_{2n}`, the magnitude of the leading coefficient.
    pub fn leading_magnitude(&self) -> f64 {
        self.lead
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn normalizer(&self) -> f64 {
        self.log_normalizer.exp()
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// Smallest radius beyond which `-2a|z|^{2n} <= psi(z) <= -a/2 |z|^{2n}`.
    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn sampler(&self) -> &SamplerTable {
        &self.sampler
    }

    /// True when every odd coefficient of `psi` is zero.
    pub fn is_symmetric(&self) -> bool {
        self.psi.coeffs().iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    #[inline]
    pub fn psi(&self, z: f64) -> f64 {
        self.psi.eval(z)
    }

    pub fn psi_polynomial(&self) -> &Polynomial {
        &self.psi
    }

    #[inline]
    pub fn log_density(&self, z: f64) -> f64 {
        self.psi.eval(z) - self.log_normalizer
    }

    #[inline]
    pub fn density(&self, z: f64) -> f64 {
        self.log_density(z).exp()
    }

    /// Exact `order`-th derivative of `psi` (equivalently of `log q`).
    pub fn log_density_derivative(&self, z: f64, order: usize) -> Result<f64> {
        Ok(self.derivative_polynomial(order)?.eval(z))
    }

    pub fn derivative_polynomial(&self, order: usize) -> Result<&Polynomial> {
        match order {
            1 => Ok(&self.d1),
            2 => Ok(&self.d2),
            3 => Ok(&self.d3),
            _ => Err(Error::UnsupportedOrder { order }),
        }
    }

    /// `I_q = \int psi'(z)^2 q(z) dz`, computed once at construction.
    pub fn fisher_information(&self) -> f64 {
        self.fisher_info
    }

    /// One draw from the noise density.
    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        self.sampler.sample(stream.uniform())
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        QuadratureSpec::with_radius(self.truncation_radius).expect("radius is positive")
    }

    /// `E[f(Z)]` for `Z ~ q`, by quadrature on `[-R, R]`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let r = self.truncation_radius;
        integrate_pieces(
            |z| f(z) * self.density(z),
            &window_breaks(r, &self.d1.real_roots()),
            &self.quadrature_spec(),
        )
    }

    /// Tail bound `P(|Z| >= t) <= 2 / (n A a t^{2n-1}) exp(-a t^{2n} / 2)`,
    /// valid for `t` at or beyond the validity radius.
    pub fn tail_bound(&self, t: f64) -> Result<f64> {
        if !(t >= self.validity_radius && t > 0.0) {
            return Err(Error::BelowValidityRadius {
                t,
                radius: self.validity_radius,
            });
        }
        Ok(log_tail_bound(t, self.half_degree, self.lead, self.log_normalizer).exp())
    }

    /// `D(q(. - mu) || q(. + mu)) = \int q(z) [psi(z) - psi(z + 2 mu)] dz`.
    pub fn kl_shifted(&self, mu: f64) -> Result<f64> {
        if !mu.is_finite() {
            return Err(Error::InvalidInput(format!("shift must be finite, got {mu}")));
        }
        if mu == 0.0 {
            return Ok(0.0);
        }
        let shifted = self.psi.shifted(2.0 * mu);
        let diff = self.psi.sub(&shifted);
        let kl = self.expectation(|z| diff.eval(z))?;
        Ok(kl.max(0.0))
    }

    /// `1/2 \int |q(z - mu) - q(z + mu)| dz`.
    pub fn tv_shifted(&self, mu: f64) -> Result<f64> {
        if !mu.is_finite() {
            return Err(Error::InvalidInput(format!("shift must be finite, got {mu}")));
        }
        if mu == 0.0 {
            return Ok(0.0);
        }
        let minus = self.psi.shifted(-mu);
        let plus = self.psi.shifted(mu);
        // The integrand has kinks exactly where the two log densities cross.
        let crossings = minus.sub(&plus).real_roots();
        let r = self.truncation_radius + mu.abs();
        let mut breaks = vec![-r, r];
        breaks.extend(crossings.into_iter().filter(|c| c.abs() < r));
        let la = self.log_normalizer;
        let spec = QuadratureSpec::with_radius(r)?;
        let tv = 0.5
            * integrate_pieces(
                |z| ((minus.eval(z) - la).exp() - (plus.eval(z) - la).exp()).abs(),
                &breaks,
                &spec,
            )?;
        Ok(tv.clamp(0.0, 1.0))
    }

    pub fn summary(&self) -> NoiseSummary {
        NoiseSummary {
            psi_coeffs: self.psi.coeffs().to_vec(),
            degree: self.degree(),
            log_normalizer: self.log_normalizer,
            normalizer: self.normalizer(),
            fisher_information: self.fisher_info,
            truncation_radius: self.truncation_radius,
            validity_radius: self.validity_radius,
        }
    }
}

fn window_breaks(r: f64, interior: &[f64]) -> Vec<f64> {
    let mut b = vec![-r, r];
    b.extend(interior.iter().copied().filter(|z| z.abs() < r));
    b
}

/// `log \int_{-r}^{r} exp(psi)`, evaluated around the peak value of `psi`.
fn log_integral_exp(psi: &Polynomial, psi_max: f64, r: f64, stationary: &[f64]) -> Result<f64> {
    let spec = QuadratureSpec::with_radius(r)?;
    let mass = integrate_pieces(|z| (psi.eval(z) - psi_max).exp(), &window_breaks(r, stationary), &spec)
        .map_err(|e| Error::NormalizationFailure {
            reason: e.to_string(),
        })?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NormalizationFailure {
            reason: format!("integral of exp(psi) evaluated to {mass}"),
        });
    }
    Ok(psi_max + mass.ln())
}

fn log_tail_bound(t: f64, n: usize, lead: f64, log_normalizer: f64) -> f64 {
    let n_f = n as f64;
    let deg = 2.0 * n_f;
    std::f64::consts::LN_2
        - n_f.ln()
        - log_normalizer
        - lead.ln()
        - (deg - 1.0) * t.ln()
        - 0.5 * lead * t.powf(deg)
}

/// Smallest `c1 >= 0` such that for `|z| >= c1`
/// `-2a|z|^{2n} <= psi(z) <= -(a/2)|z|^{2n}`.
///
/// Both `psi + (a/2) z^{2n}` and `psi + 2a z^{2n}` have their final sign
/// fixed beyond their outermost real root, so `c1` is the largest root
/// magnitude of the two.
fn sandwich_radius(psi: &Polynomial, lead: f64, degree: usize) -> f64 {
    let upper = psi.plus_monomial(0.5 * lead, degree);
    let lower = psi.plus_monomial(2.0 * lead, degree);
    upper
        .real_roots()
        .into_iter()
        .chain(lower.real_roots())
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// Radius `R >= c1` with tail bound at most [`MAX_TAIL_MASS`]: doubling from
/// the validity radius, then bisection.
fn truncation_radius_for<F: Fn(f64) -> f64>(c1: f64, log_bound: F) -> Result<f64> {
    let target = MAX_TAIL_MASS.ln();
    let ok = |t: f64| t > 0.0 && t >= c1 && log_bound(t) <= target;
    let mut lo = c1;
    let mut hi = if c1 > 0.0 { c1 } else { 1.0 };
    let mut doublings = 0;
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NormalizationFailure {
                reason: "no truncation radius satisfies the tail bound".into(),
            });
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> ExpPolyNoise {
        ExpPolyNoise::new(&[0.0, 0.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn gaussian_normalizer() {
        let g = ExpPolyNoise::gaussian();
        assert!((g.log_normalizer() - 0.918_938_533_204_672_7).abs() < 1e-10);
        assert!((g.log_density(0.0) + 0.918_938_533_204_672_7).abs() < 1e-10);
    }

    #[test]
    fn quartic_normalizer() {
        let q = quartic();
        assert!((q.normalizer() - 1.812_804_954_110_954).abs() < 1e-9);
        assert!((q.log_density(0.0) + 0.594_875_344_138_132).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert_eq!(ExpPolyNoise::new(&[0.0, 1.0, 0.5]).unwrap_err().name(), "NonNegativeLeadingCoefficient");
        assert_eq!(ExpPolyNoise::new(&[0.0, 0.0, 0.0, -1.0]).unwrap_err().name(), "OddDegree");
        assert_eq!(ExpPolyNoise::new(&[3.0]).unwrap_err().name(), "DegreeTooLow");
        assert_eq!(ExpPolyNoise::new(&[]).unwrap_err().name(), "InvalidInput");
        assert_eq!(ExpPolyNoise::new(&[0.0, f64::NAN, -1.0]).unwrap_err().name(), "InvalidInput");
    }

    #[test]
    fn trailing_zeros_are_ignored() {
        let g = ExpPolyNoise::new(&[0.0, 0.0, -0.5, 0.0, 0.0]).unwrap();
        assert_eq!(g.degree(), 2);
    }

    #[test]
    fn derivatives() {
        let g = ExpPolyNoise::gaussian();
        assert_eq!(g.log_density_derivative(2.0, 1).unwrap(), -2.0);
        assert_eq!(g.log_density_derivative(5.0, 3).unwrap(), 0.0);
        assert_eq!(quartic().log_density_derivative(1.0, 3).unwrap(), -24.0);
        assert_eq!(g.log_density_derivative(1.0, 4).unwrap_err().name(), "UnsupportedOrder");
    }

    #[test]
    fn validity_radius_of_mixed_polynomial() {
        // psi = -z^4 + 3 z^2: upper sandwich needs 3 z^2 <= z^4 / 2, i.e. |z| >= sqrt(6).
        let n = ExpPolyNoise::new(&[0.0, 0.0, 3.0, 0.0, -1.0]).unwrap();
        assert!((n.validity_radius() - 6f64.sqrt()).abs() < 1e-9);
        assert_eq!(quartic().validity_radius(), 0.0);
        assert_eq!(n.tail_bound(2.0).unwrap_err().name(), "BelowValidityRadius");
    }

    #[test]
    fn tail_bound_formula_and_validity() {
        let q = quartic();
        let a = q.normalizer();
        let want = 2.0 / (2.0 * a * 8.0) * (-8.0f64).exp();
        let got = q.tail_bound(2.0).unwrap();
        assert!((got / want - 1.0).abs() < 1e-9);
        assert!((got - 2.31e-5).abs() < 0.01e-5);
        let tail = 2.0 * crate::numerics::integrate_between(|z| q.density(z), 2.0, 6.0, &q.quadrature_spec()).unwrap();
        assert!(got >= tail);
        let g = ExpPolyNoise::gaussian();
        assert!(g.tail_bound(6.0).unwrap() >= 2.0 * crate::numerics::normal_upper_tail(6.0));
    }

    #[test]
    fn truncation_radius_meets_tail_target() {
        for n in [ExpPolyNoise::gaussian(), quartic()] {
            let r = n.truncation_radius();
            assert!(n.tail_bound(r).unwrap() <= MAX_TAIL_MASS);
            let total = n.expectation(|_| 1.0).unwrap();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn parse_coefficient_lists() {
        assert_eq!(parse_coefficients("0, 0,-0.5").unwrap(), vec![0.0, 0.0, -0.5]);
        assert!(parse_coefficients("0,x").is_err());
        assert!(parse_coefficients("").is_err());
    }

    #[test]
    fn kl_and_tv_vanish_at_zero_shift() {
        let q = quartic();
        assert_eq!(q.kl_shifted(0.0).unwrap(), 0.0);
        assert_eq!(q.tv_shifted(0.0).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_detection() {
        assert!(quartic().is_symmetric());
        assert!(!ExpPolyNoise::new(&[0.0, 0.3, -0.5]).unwrap().is_symmetric());
    }
}
