use super::{AttackOutcome, Direction};
use crate::classify::{check_budget, loglik_transform, sorted_desc, sum_range, tsum};
use crate::error::{Error, Result};
use crate::model::ProblemInstance;

const ORACLE_MAX_D: usize = 12;
const ORACLE_MAX_K: usize = 2;
const MAX_DOUBLINGS: usize = 64;

/// Margin by which an injected score must clear every original score.
fn sentinel_margin(u: &[f64]) -> f64 {
    u.iter().map(|v| v.abs()).sum::<f64>() + 1.0
}

/// Extremal truncated sum over a descending-sorted score vector.
///
/// Minimizing overwrites the `k` largest scores with values below everything
/// else; the truncation then discards those and the next `k` largest, leaving
/// `s[2k..d]`. Maximizing is the mirror image, leaving `s[0..d-2k]`.
#[inline]
pub fn worst_case_tsum_sorted(sorted: &[f64], k: usize, direction: Direction) -> f64 {
    let d = sorted.len();
    match direction {
        Direction::Minimize => sum_range(sorted, 2 * k, d),
        Direction::Maximize => sum_range(sorted, 0, d - 2 * k),
    }
}

/// Extremal `TSum_k` over all score vectors within `l0` distance `k` of
/// `scores`, plus a perturbation attaining it.
pub fn worst_case_tsum(
    scores: &[f64],
    k: usize,
    direction: Direction,
) -> Result<(f64, AttackOutcome)> {
    check_budget(k, scores.len())?;
    let value_check = tsum(scores, 0)?; // rejects NaN
    if k == 0 {
        return Ok((
            value_check,
            AttackOutcome {
                perturbed: scores.to_vec(),
                changed_indices: Vec::new(),
                reverted: false,
                worst_statistic: Some(value_check),
                mismatches: 0,
            },
        ));
    }
    let d = scores.len();
    let sorted = sorted_desc(scores);
    let value = worst_case_tsum_sorted(&sorted, k, direction);

    // Rank indices by score, descending, ties by position.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let margin = sentinel_margin(scores);
    let (mut changed, sentinel) = match direction {
        Direction::Minimize => (order[..k].to_vec(), sorted[d - 1] - margin),
        Direction::Maximize => (order[d - k..].to_vec(), sorted[0] + margin),
    };
    changed.sort_unstable();
    let mut perturbed = scores.to_vec();
    for &i in &changed {
        perturbed[i] = sentinel;
    }
    Ok((
        value,
        AttackOutcome {
            perturbed,
            changed_indices: changed,
            reverted: false,
            worst_statistic: Some(value),
            mismatches: 0,
        },
    ))
}

/// Extremal plain sum under an `l0` budget: unbounded as soon as `k >= 1`.
pub fn worst_case_sum(scores: &[f64], k: usize, direction: Direction) -> f64 {
    if k == 0 {
        return scores.iter().sum();
    }
    match direction {
        Direction::Minimize => f64::NEG_INFINITY,
        Direction::Maximize => f64::INFINITY,
    }
}

/// Exhaustive oracle for the extremal truncated sum on small inputs.
///
/// Tries every index subset of size at most `k` and, per chosen index, every
/// replacement from: a value below all scores, a value above all scores,
/// each existing score, and each midpoint of adjacent distinct sorted
/// scores. Since `TSum_k` only depends on the ordering of the replacements
/// relative to the kept scores, these candidates cover every case.
pub fn brute_force_attack(scores: &[f64], k: usize, direction: Direction) -> Result<f64> {
    let d = scores.len();
    if d > ORACLE_MAX_D || k > ORACLE_MAX_K {
        return Err(Error::InstanceTooLarge { d, k });
    }
    check_budget(k, d)?;
    let base = tsum(scores, k)?;
    if k == 0 {
        return Ok(base);
    }

    let mut distinct = sorted_desc(scores);
    distinct.reverse();
    distinct.dedup();
    let margin = sentinel_margin(scores);
    let mut candidates = vec![distinct[0] - margin, distinct[distinct.len() - 1] + margin];
    candidates.extend_from_slice(&distinct);
    candidates.extend(distinct.windows(2).map(|w| 0.5 * (w[0] + w[1])));

    let better = |a: f64, b: f64| match direction {
        Direction::Minimize => a < b,
        Direction::Maximize => a > b,
    };
    let mut best = base;
    let mut work = scores.to_vec();
    for i in 0..d {
        for &ci in &candidates {
            work[i] = ci;
            let v = tsum(&work, k)?;
            if better(v, best) {
                best = v;
            }
            if k >= 2 {
                for j in i + 1..d {
                    for &cj in &candidates {
                        work[j] = cj;
                        let v = tsum(&work, k)?;
                        if better(v, best) {
                            best = v;
                        }
                    }
                    work[j] = scores[j];
                }
            }
        }
        work[i] = scores[i];
    }
    Ok(best)
}

/// Overwrites the targeted samples with extreme values whose scores fall
/// below (`Minimize`) or above (`Maximize`) every original score by more
/// than `sum |score| + 1`.
///
/// For exp-poly noise with `mu != 0` the score of `x` grows like
/// `4n a mu x^{2n-1}`, so the extreme is searched by doubling `|x|` on the
/// side where the score has the required sign.
pub fn realize_in_x_space(
    instance: &ProblemInstance,
    x: &[f64],
    targets: &[(usize, Direction)],
) -> Result<Vec<f64>> {
    let scores = loglik_transform(instance, x)?.scores;
    if let Some(&(i, _)) = targets.iter().find(|(i, _)| *i >= x.len()) {
        return Err(Error::InvalidInput(format!("target index {i} out of range")));
    }
    let margin = sentinel_margin(&scores);
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mu = instance.mu_d();
    let noise = instance.noise();

    let find_extreme = |direction: Direction| -> Result<f64> {
        let (side, reached): (f64, Box<dyn Fn(f64) -> bool>) = match direction {
            Direction::Minimize => (-mu.signum(), Box::new(move |s: f64| s < lo - margin)),
            Direction::Maximize => (mu.signum(), Box::new(move |s: f64| s > hi + margin)),
        };
        if mu == 0.0 {
            return Err(Error::ExtremeSearchFailed);
        }
        let mut mag = 1.0f64;
        for _ in 0..MAX_DOUBLINGS {
            let candidate = side * mag;
            let s = noise.psi(candidate - mu) - noise.psi(candidate + mu);
            if !s.is_finite() {
                break;
            }
            if reached(s) {
                return Ok(candidate);
            }
            mag *= 2.0;
        }
        Err(Error::ExtremeSearchFailed)
    };

    let mut out = x.to_vec();
    let mut cached: [Option<f64>; 2] = [None, None];
    for &(i, direction) in targets {
        let slot = match direction {
            Direction::Minimize => 0,
            Direction::Maximize => 1,
        };
        let v = match cached[slot] {
            Some(v) => v,
            None => {
                let v = find_extreme(direction)?;
                cached[slot] = Some(v);
                v
            }
        };
        out[i] = v;
    }
    Ok(out)
}

/// Worst-case attack on the truncated classifier, carried out in sample
/// space. The achieved truncated sum is checked against the closed form to
/// `1e-9` relative.
pub fn realize_worst_case(
    instance: &ProblemInstance,
    x: &[f64],
    k: usize,
    direction: Direction,
) -> Result<AttackOutcome> {
    let scores = loglik_transform(instance, x)?.scores;
    let (value, in_scores) = worst_case_tsum(&scores, k, direction)?;
    let targets: Vec<(usize, Direction)> = in_scores
        .changed_indices
        .iter()
        .map(|&i| (i, direction))
        .collect();
    let perturbed = realize_in_x_space(instance, x, &targets)?;
    let achieved = tsum(&loglik_transform(instance, &perturbed)?.scores, k)?;
    if (achieved - value).abs() > 1e-9 * value.abs().max(1.0) {
        return Err(Error::ExtremeSearchFailed);
    }
    Ok(AttackOutcome {
        perturbed,
        changed_indices: in_scores.changed_indices,
        reverted: false,
        worst_statistic: Some(value),
        mismatches: 0,
    })
}
