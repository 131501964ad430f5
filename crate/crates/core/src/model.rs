//! The data-generating process: a label `y` in {-1, +1} and `d` samples
//! `x_i = y * mu_d + z_i` with `mu_d = c / sqrt(d)` and i.i.d. noise `z_i`.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::ExpPolyNoise;
use crate::numerics::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "-1")]
    Neg,
    #[serde(rename = "+1")]
    Pos,
}

impl Label {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Pos => "+1",
            Label::Neg => "-1",
        })
    }
}

/// How the label of a generated dataset is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelChoice {
    Fixed(Label),
    Uniform,
}

#[derive(Debug, Clone)]
pub struct ProblemInstance {
    d: usize,
    c: f64,
    noise: Arc<ExpPolyNoise>,
}

impl ProblemInstance {
    pub fn new(d: usize, c: f64, noise: Arc<ExpPolyNoise>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension d must be at least 1".into()));
        }
        if !(c.is_finite() && c != 0.0) {
            return Err(Error::InvalidInput(format!("signal constant c must be finite and nonzero, got {c}")));
        }
        Ok(ProblemInstance { d, c, noise })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `mu_d = c / sqrt(d)`, recomputed on every call.
    #[inline]
    pub fn mu_d(&self) -> f64 {
        self.c / (self.d as f64).sqrt()
    }

    pub fn noise(&self) -> &ExpPolyNoise {
        &self.noise
    }

    pub fn noise_arc(&self) -> &Arc<ExpPolyNoise> {
        &self.noise
    }

    /// Same noise and signal constant in a different dimension.
    pub fn with_dimension(&self, d: usize) -> Result<Self> {
        Self::new(d, self.c, self.noise.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub label: Label,
    pub samples: Vec<f64>,
    pub master_seed: u64,
    pub trial_id: u64,
}

/// Draws one labeled dataset. A uniform label consumes one coin flip from
/// `stream` before the `d` noise draws.
pub fn generate(
    instance: &ProblemInstance,
    label: LabelChoice,
    stream: &mut RandomStream,
) -> LabeledDataset {
    let label = match label {
        LabelChoice::Fixed(l) => l,
        LabelChoice::Uniform => {
            if stream.coin() {
                Label::Pos
            } else {
                Label::Neg
            }
        }
    };
    let shift = label.sign() * instance.mu_d();
    let noise = instance.noise();
    let samples = (0..instance.d()).map(|_| shift + noise.sample(stream)).collect();
    LabeledDataset {
        label,
        samples,
        master_seed: stream.master_seed(),
        trial_id: stream.stream_id(),
    }
}

/// Writes one CSV row per dataset: `master_seed,trial_id,label,x_1,...,x_d`.
pub fn write_datasets_csv<W: Write>(mut out: W, datasets: &[LabeledDataset]) -> Result<()> {
    let d = datasets.first().map_or(0, |ds| ds.samples.len());
    let mut header = String::from("master_seed,trial_id,label");
    for i in 1..=d {
        header.push_str(&format!(",x{i}"));
    }
    writeln!(out, "{header}")?;
    for ds in datasets {
        if ds.samples.len() != d {
            return Err(Error::InvalidInput("datasets in one dump must share d".into()));
        }
        write!(out, "{},{},{}", ds.master_seed, ds.trial_id, ds.label)?;
        for x in &ds.samples {
            write!(out, ",{x}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::derive_stream;

    fn gaussian(d: usize) -> ProblemInstance {
        ProblemInstance::new(d, 1.0, Arc::new(ExpPolyNoise::gaussian())).unwrap()
    }

    #[test]
    fn mean_relation_is_exact() {
        let p = gaussian(4096);
        assert_eq!(p.mu_d(), 1.0 / 64.0);
        assert_eq!(p.mu_d() * 64.0, p.c());
        assert!(ProblemInstance::new(0, 1.0, p.noise_arc().clone()).is_err());
        assert!(ProblemInstance::new(4, 0.0, p.noise_arc().clone()).is_err());
        assert!(ProblemInstance::new(4, -2.0, p.noise_arc().clone()).is_ok());
    }

    #[test]
    fn conditional_means() {
        let p = gaussian(4);
        for label in [Label::Pos, Label::Neg] {
            let mut sum = 0.0;
            let mut n = 0usize;
            for t in 0..250_000u64 {
                let ds = generate(&p, LabelChoice::Fixed(label), &mut derive_stream(5, t));
                assert_eq!(ds.samples.len(), 4);
                sum += ds.samples.iter().sum::<f64>();
                n += 4;
            }
            let mean = sum / n as f64;
            let se = 1.0 / (n as f64).sqrt();
            assert!((mean - label.sign() * 0.5).abs() < 4.0 * se, "{label}: {mean}");
        }
    }

    #[test]
    fn replay_is_identical() {
        let p = gaussian(16);
        let a = generate(&p, LabelChoice::Uniform, &mut derive_stream(9, 3));
        let b = generate(&p, LabelChoice::Uniform, &mut derive_stream(9, 3));
        assert_eq!(a, b);
        assert_eq!((a.master_seed, a.trial_id), (9, 3));
    }

    #[test]
    fn csv_dump() {
        let p = gaussian(2);
        let ds = vec![
            generate(&p, LabelChoice::Fixed(Label::Pos), &mut derive_stream(1, 0)),
            generate(&p, LabelChoice::Fixed(Label::Neg), &mut derive_stream(1, 1)),
        ];
        let mut buf = Vec::new();
        write_datasets_csv(&mut buf, &ds).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "master_seed,trial_id,label,x1,x2");
        assert!(lines[1].starts_with("1,0,+1,"));
        assert!(lines[2].starts_with("1,1,-1,"));
    }
}
