use super::AttackOutcome;
use crate::model::{Label, LabeledDataset, ProblemInstance};
use crate::noise::ExpPolyNoise;
use crate::numerics::RandomStream;

/// Surrogate value written where the coupled pair disagrees.
const MISMATCH_VALUE: f64 = 0.0;

/// Probability that the maximal coupling of `q(. - mu)` and `q(. + mu)`
/// keeps an observed sample `x` drawn from the `label` class:
/// `min(q(x - mu), q(x + mu)) / q(x - y mu)`.
#[inline]
pub fn keep_probability(noise: &ExpPolyNoise, mu: f64, x: f64, label: Label) -> f64 {
    let plus = noise.psi(x - mu);
    let minus = noise.psi(x + mu);
    let own = match label {
        Label::Pos => plus,
        Label::Neg => minus,
    };
    (plus.min(minus) - own).exp()
}

/// Coupling attack on a dataset generated under `instance`.
pub fn coupling_attack(
    instance: &ProblemInstance,
    dataset: &LabeledDataset,
    k: usize,
    stream: &mut RandomStream,
) -> AttackOutcome {
    coupling_with_shift(
        instance.noise(),
        instance.mu_d(),
        dataset.label,
        &dataset.samples,
        k,
        stream,
    )
}

/// Per sample, keep `x_i` with the coupling's keep probability and otherwise
/// replace it by the label-free value 0. If more than `k` samples would
/// change, the original samples are returned and the outcome is marked
/// reverted. One uniform is consumed per sample either way.
pub fn coupling_with_shift(
    noise: &ExpPolyNoise,
    mu: f64,
    label: Label,
    samples: &[f64],
    k: usize,
    stream: &mut RandomStream,
) -> AttackOutcome {
    let mut perturbed = samples.to_vec();
    let mut changed = Vec::new();
    let mut mismatches = 0;
    for (i, &x) in samples.iter().enumerate() {
        let keep = keep_probability(noise, mu, x, label);
        if stream.uniform() >= keep {
            mismatches += 1;
            if x != MISMATCH_VALUE {
                perturbed[i] = MISMATCH_VALUE;
                changed.push(i);
            }
        }
    }
    if changed.len() > k {
        return AttackOutcome {
            perturbed: samples.to_vec(),
            changed_indices: Vec::new(),
            reverted: true,
            worst_statistic: None,
            mismatches,
        };
    }
    AttackOutcome {
        perturbed,
        changed_indices: changed,
        reverted: false,
        worst_statistic: None,
        mismatches,
    }
}
