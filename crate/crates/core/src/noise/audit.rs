//! Numerical audit of the regularity conditions the exp-poly family is
//! known to satisfy: finite Fisher information, integrable local suprema of
//! `|psi'''|` and `|psi''|^2`, and a `(log d)^gamma` envelope for the
//! largest score `max_i |psi'(Z_i)|`.

use serde::Serialize;

use super::ExpPolyNoise;
use crate::error::{Error, Result};
use crate::numerics::{derive_stream, integrate_pieces, Polynomial, QuadratureSpec};

/// Uniform grid nodes per supremum interval, on top of the endpoints and
/// interior stationary points.
const SUP_GRID: usize = 64;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AuditReport {
    pub zeta: f64,
    /// `E[ sup_{|t - Z| <= zeta} |psi'''(t)| ]`.
    pub a2_value: f64,
    /// `E[ (sup_{|t - Z| <= zeta} |psi''(t)|)^2 ]`.
    pub a3_value: f64,
    /// Exponent `1 - 1/(2n)` of the score envelope.
    pub a4_gamma: f64,
    /// Envelope constant `C_4`.
    pub a4_c4: f64,
    /// Fraction of probe trials with `max_i |psi'(Z_i)| > C_4 (log d)^gamma`.
    pub a4_empirical_exceed_rate: f64,
    pub a4_threshold: f64,
    pub d_probe: usize,
    pub trials: usize,
    pub fisher_finite: bool,
}

pub fn audit_assumptions(
    noise: &ExpPolyNoise,
    zeta: f64,
    d_probe: usize,
    trials: usize,
    seed: u64,
) -> Result<AuditReport> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::InvalidInput(format!("zeta must be positive, got {zeta}")));
    }
    if d_probe < 3 {
        return Err(Error::InvalidInput(format!("d_probe must be at least 3, got {d_probe}")));
    }
    if trials == 0 {
        return Err(Error::InvalidInput("audit needs at least one trial".into()));
    }

    let d2 = noise.derivative_polynomial(2)?;
    let d3 = noise.derivative_polynomial(3)?;
    let a2_value = expected_local_sup(noise, d3, zeta, |s| s)?;
    let a3_value = expected_local_sup(noise, d2, zeta, |s| s * s)?;

    let (gamma, c4) = score_envelope(noise);
    let threshold = c4 * (d_probe as f64).ln().powf(gamma);
    let d1 = noise.derivative_polynomial(1)?;
    let exceed = (0..trials as u64)
        .filter(|&t| {
            let mut stream = derive_stream(seed, t);
            let max = (0..d_probe)
                .map(|_| d1.eval(noise.sample(&mut stream)).abs())
                .fold(0.0, f64::max);
            max > threshold
        })
        .count();

    let fisher = noise.fisher_information();
    Ok(AuditReport {
        zeta,
        a2_value,
        a3_value,
        a4_gamma: gamma,
        a4_c4: c4,
        a4_empirical_exceed_rate: exceed as f64 / trials as f64,
        a4_threshold: threshold,
        d_probe,
        trials,
        fisher_finite: fisher.is_finite() && fisher > 0.0,
    })
}

/// `E[ g(sup_{|t - Z| <= zeta} |p(t)|) ]` by quadrature over `Z ~ q`.
fn expected_local_sup<G: Fn(f64) -> f64>(
    noise: &ExpPolyNoise,
    p: &Polynomial,
    zeta: f64,
    g: G,
) -> Result<f64> {
    let critical = p.derivative().real_roots();
    let r = noise.truncation_radius();
    // The sup switches maximizer near zeros and extrema of p shifted by zeta.
    let mut breaks = vec![-r, r];
    for &c in critical.iter().chain(p.real_roots().iter()) {
        breaks.extend([c - zeta, c, c + zeta].into_iter().filter(|b| b.abs() < r));
    }
    let spec = QuadratureSpec::new(r, 1e-12, 1e-11, 500_000)?;
    integrate_pieces(
        |z| g(p.max_abs_on(z - zeta, z + zeta, &critical, SUP_GRID)) * noise.density(z),
        &breaks,
        &spec,
    )
}

/// `(gamma, C_4)` with `gamma = 1 - 1/(2n)` and
/// `C_4 = sum_i |i b_i| c_2^{i-1}`, where `c_2` satisfies
/// `a c_2^{2n} / 2 = 2`. Once `max |Z_i| <= c_2 (log d)^{1/(2n)}` and
/// `log d >= 1`, every score obeys `|psi'(Z_i)| <= C_4 (log d)^gamma`.
fn score_envelope(noise: &ExpPolyNoise) -> (f64, f64) {
    let deg = noise.degree() as f64;
    let gamma = 1.0 - 1.0 / deg;
    let c2 = (4.0 / noise.leading_magnitude()).powf(1.0 / deg);
    let c4 = noise
        .psi_coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, b)| (i as f64 * b).abs() * c2.powi(i as i32 - 1))
        .sum();
    (gamma, c4)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_audit_values() {
        let g = ExpPolyNoise::gaussian();
        let rep = audit_assumptions(&g, 0.5, 4096, 200, 3).unwrap();
        assert_eq!(rep.a2_value, 0.0);
        assert!((rep.a3_value - 1.0).abs() < 1e-8);
        assert_eq!(rep.a4_gamma, 0.5);
        assert!(rep.fisher_finite);
        assert!(rep.a4_empirical_exceed_rate <= 0.01);
    }

    #[test]
    fn quartic_third_derivative_sup() {
        let q = ExpPolyNoise::new(&[0.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        let rep = audit_assumptions(&q, 0.5, 1024, 50, 3).unwrap();
        // 24 (E|Z| + 1/2) with E|Z| = sqrt(pi) / Gamma(1/4).
        let e_abs = std::f64::consts::PI.sqrt() / libm::tgamma(0.25);
        assert!((rep.a2_value - 24.0 * (e_abs + 0.5)).abs() < 1e-6, "{}", rep.a2_value);
        assert_eq!(rep.a4_gamma, 0.75);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = ExpPolyNoise::gaussian();
        assert!(audit_assumptions(&g, 0.0, 100, 10, 1).is_err());
        assert!(audit_assumptions(&g, 0.5, 2, 10, 1).is_err());
        assert!(audit_assumptions(&g, 0.5, 100, 0, 1).is_err());
    }
}
