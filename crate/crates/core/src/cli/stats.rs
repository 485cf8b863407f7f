use serde::{Deserialize, Serialize};

use super::manifest::Project;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub classes: usize,
    pub mwe_lemmas: usize,
}

impl Counts {
    pub fn of(project: &Project) -> Self {
        Counts {
            classes: project.class_count(),
            mwe_lemmas: project.mwe_lemma_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthStats {
    pub before: Counts,
    pub after: Counts,
    pub classes_delta: String,
    pub mwe_lemmas_delta: String,
}

impl GrowthStats {
    pub fn new(before: Counts, after: Counts) -> Self {
        GrowthStats {
            before,
            after,
            classes_delta: percent_delta(before.classes, after.classes),
            mwe_lemmas_delta: percent_delta(before.mwe_lemmas, after.mwe_lemmas),
        }
    }
}

/// `100·(new−old)/old` with one decimal, halves rounded away from zero,
/// computed on integers. `n/a` when `old` is zero.
pub fn percent_delta(old: usize, new: usize) -> String {
    if old == 0 {
        return "n/a".to_string();
    }
    let diff = new as i128 - old as i128;
    let den = old as i128;
    let tenths = (2 * 1000 * diff.abs() + den) / (2 * den);
    let sign = if diff < 0 { '-' } else { '+' };
    format!("{sign}{}.{}%", tenths / 10, tenths % 10)
}
