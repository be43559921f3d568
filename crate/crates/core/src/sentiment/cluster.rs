use serde::{Deserialize, Serialize};

use super::EmotionProfile;
use crate::corpus::PersonId;
use crate::error::{Error, Result};

/// Distances below this are treated as exact ties or zero.
const DIST_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dendrogram {
    Leaf { person: PersonId },
    Merge { left: Box<Dendrogram>, right: Box<Dendrogram>, height: f64 },
}

impl Dendrogram {
    pub fn height(&self) -> f64 {
        match self {
            Dendrogram::Leaf { .. } => 0.0,
            Dendrogram::Merge { height, .. } => *height,
        }
    }

    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<&PersonId> {
        match self {
            Dendrogram::Leaf { person } => vec![person],
            Dendrogram::Merge { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }
}

pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let d = 1.0 - dot / (na * nb);
    if d.abs() < DIST_EPS {
        0.0
    } else {
        d.max(0.0)
    }
}

/// Normalized emotion shares plus valence, min-max scaled across the input, as a
/// ninth coordinate. Profiles with no emotion matches are dropped.
pub fn feature_vectors(profiles: &[EmotionProfile]) -> Vec<(PersonId, Vec<f64>)> {
    let valid: Vec<&EmotionProfile> = profiles.iter().filter(|p| p.normalized.0.iter().any(|&v| v > 0.0)).collect();
    let (lo, hi) = valid
        .iter()
        .map(|p| p.valence_sum as f64)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    valid
        .into_iter()
        .map(|p| {
            let mut v = p.normalized.0.to_vec();
            v.push(if hi > lo { (p.valence_sum as f64 - lo) / (hi - lo) } else { 0.0 });
            (p.person.clone(), v)
        })
        .collect()
}

/// Average-linkage agglomerative clustering on cosine distance. Among equally
/// close pairs, the one whose lowest member indices come first merges first.
pub fn cluster_profiles(profiles: &[EmotionProfile]) -> Result<Dendrogram> {
    let points = feature_vectors(profiles);
    if points.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "clustering needs at least 2 profiles with emotion matches, got {}",
            points.len()
        )));
    }
    let n = points.len();
    let base: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| cosine_distance(&points[i].1, &points[j].1)).collect()).collect();

    // Each live cluster: (members, lowest member index, tree).
    let mut live: Vec<(Vec<usize>, usize, Dendrogram)> = points
        .into_iter()
        .enumerate()
        .map(|(i, (person, _))| (vec![i], i, Dendrogram::Leaf { person }))
        .collect();

    let avg = |a: &[usize], b: &[usize]| {
        let sum: f64 = a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| base[i][j]).sum();
        sum / (a.len() * b.len()) as f64
    };

    while live.len() > 1 {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for i in 0..live.len() {
            for j in i + 1..live.len() {
                let d = avg(&live[i].0, &live[j].0);
                let key = (live[i].1.min(live[j].1), live[i].1.max(live[j].1));
                let better = match best {
                    None => true,
                    Some((bd, bkey, _, _)) => d < bd - DIST_EPS || ((d - bd).abs() <= DIST_EPS && key < bkey),
                };
                if better {
                    best = Some((d, key, i, j));
                }
            }
        }
        let (d, _, i, j) = best.expect("at least one pair");
        let (mut bm, bl, bt) = live.remove(j);
        let (am, al, at) = live.remove(i);
        let (left, right) = if al <= bl { (at, bt) } else { (bt, at) };
        let mut members = am;
        members.append(&mut bm);
        let height = if d.abs() < DIST_EPS { 0.0 } else { d };
        live.insert(i, (members, al.min(bl), Dendrogram::Merge { left: Box::new(left), right: Box::new(right), height }));
    }
    Ok(live.pop().expect("one cluster left").2)
}
