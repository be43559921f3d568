//! First-significant-digit analysis against Benford's law.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::CorpusStats;

/// Below this many usable values the verdict is `insufficient`.
pub const MIN_SAMPLE: u64 = 100;

/// Leading significant digit of a positive finite number, scale-free
/// (`0.042 → 4`). Zero, negatives and non-finite values give `None`.
pub fn first_digit(x: f64) -> Option<u8> {
    if !(x.is_finite() && x > 0.0) {
        return None;
    }
    // Scientific notation gives the leading digit directly and rounds away
    // representation noise such as 2.9999999999999996.
    let s = format!("{x:.12e}");
    s.bytes().next().map(|b| b - b'0').filter(|d| (1..=9).contains(d))
}

/// `log10(1 + 1/d)` for d = 1..9.
pub fn benford_expected() -> [f64; 9] {
    std::array::from_fn(|i| (1.0 + 1.0 / (i as f64 + 1.0)).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DigitDistribution {
    pub counts: [u64; 9],
    pub n: u64,
    pub freq: [f64; 9],
}

impl DigitDistribution {
    fn from_counts(counts: [u64; 9]) -> Self {
        let n: u64 = counts.iter().sum();
        let freq = counts.map(|c| if n == 0 { 0.0 } else { c as f64 / n as f64 });
        DigitDistribution { counts, n, freq }
    }
}

/// Digit counts over the usable values; counting runs in parallel.
pub fn digit_distribution(values: &[f64]) -> DigitDistribution {
    let counts = values
        .par_iter()
        .fold(
            || [0u64; 9],
            |mut acc, &x| {
                if let Some(d) = first_digit(x) {
                    acc[d as usize - 1] += 1;
                }
                acc
            },
        )
        .reduce(|| [0u64; 9], |a, b| std::array::from_fn(|i| a[i] + b[i]));
    DigitDistribution::from_counts(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Close,
    Acceptable,
    Marginal,
    Nonconforming,
    Insufficient,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Close => "close",
            Verdict::Acceptable => "acceptable",
            Verdict::Marginal => "marginal",
            Verdict::Nonconforming => "nonconforming",
            Verdict::Insufficient => "insufficient",
        })
    }
}

/// First-digit MAD bands from the auditing literature.
pub fn verdict_for_mad(mad: f64) -> Verdict {
    if mad <= 0.006 {
        Verdict::Close
    } else if mad <= 0.012 {
        Verdict::Acceptable
    } else if mad <= 0.015 {
        Verdict::Marginal
    } else {
        Verdict::Nonconforming
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conformity {
    pub n: u64,
    pub counts: [u64; 9],
    pub freq: [f64; 9],
    pub expected: [f64; 9],
    /// Pearson statistic against the expected counts, 8 degrees of freedom.
    pub chi_square: f64,
    /// Mean absolute deviation between observed and expected frequencies.
    pub mad: f64,
    pub verdict: Verdict,
}

/// Compares the first-digit distribution of `values` with Benford's law. The
/// verdict rests on MAD; chi-square is reported but over-rejects on large samples.
pub fn conformity(values: &[f64]) -> Conformity {
    let dist = digit_distribution(values);
    let expected = benford_expected();
    let n = dist.n as f64;
    let chi_square = if dist.n == 0 {
        0.0
    } else {
        (0..9).map(|i| (dist.counts[i] as f64 - n * expected[i]).powi(2) / (n * expected[i])).sum()
    };
    let mad = (0..9).map(|i| (dist.freq[i] - expected[i]).abs()).sum::<f64>() / 9.0;
    let verdict = if dist.n < MIN_SAMPLE { Verdict::Insufficient } else { verdict_for_mad(mad) };
    Conformity { n: dist.n, counts: dist.counts, freq: dist.freq, expected, chi_square, mad, verdict }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    BodyLength,
    DailyCount,
}

/// Body lengths or per-day message counts as a numeric series.
pub fn corpus_series(stats: &CorpusStats, series: Series) -> Vec<f64> {
    match series {
        Series::BodyLength => stats.body_lengths.iter().map(|&n| n as f64).collect(),
        Series::DailyCount => stats.daily_counts.values().map(|&n| n as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_digit_examples() {
        assert_eq!(first_digit(7.0), Some(7));
        assert_eq!(first_digit(0.042), Some(4));
        assert_eq!(first_digit(1999.0), Some(1));
        assert_eq!(first_digit(0.3 * 3.0), Some(9));
        assert_eq!(first_digit(0.0), None);
        assert_eq!(first_digit(-5.0), None);
        assert_eq!(first_digit(f64::NAN), None);
        assert_eq!(first_digit(f64::MIN_POSITIVE), Some(2));
    }

    #[test]
    fn expected_values() {
        let e = benford_expected();
        assert!((e[0] - std::f64::consts::LOG10_2).abs() < 1e-15);
        assert!((e[8] - 0.04576).abs() < 1e-5);
        assert!((e.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_samples_are_insufficient() {
        let v: Vec<f64> = (1..=50).map(f64::from).collect();
        assert_eq!(conformity(&v).verdict, Verdict::Insufficient);
    }

    #[test]
    fn constant_series_is_nonconforming() {
        let c = conformity(&[555.0; 500]);
        assert_eq!(c.counts[4], 500);
        assert_eq!(c.verdict, Verdict::Nonconforming);
    }

    #[test]
    fn bad_values_are_excluded() {
        let d = digit_distribution(&[1.0, 0.0, -3.0, f64::INFINITY, 20.0]);
        assert_eq!(d.n, 2);
        assert_eq!(d.counts[0] + d.counts[1], 2);
    }

    #[test]
    fn mad_bands() {
        assert_eq!(verdict_for_mad(0.006), Verdict::Close);
        assert_eq!(verdict_for_mad(0.0061), Verdict::Acceptable);
        assert_eq!(verdict_for_mad(0.015), Verdict::Marginal);
        assert_eq!(verdict_for_mad(0.02), Verdict::Nonconforming);
    }
}
