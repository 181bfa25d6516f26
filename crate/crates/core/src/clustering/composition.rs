use serde::{Deserialize, Serialize};

use crate::corpus::Gender;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenderCounts {
    pub female: usize,
    pub male: usize,
}

impl GenderCounts {
    pub fn from_genders(genders: &[Gender]) -> Self {
        let mut c = GenderCounts::default();
        for g in genders {
            match g {
                Gender::Female => c.female += 1,
                Gender::Male => c.male += 1,
                Gender::Unknown => {}
            }
        }
        c
    }

    pub fn female_fraction(&self) -> f64 {
        let total = self.female + self.male;
        if total == 0 {
            0.0
        } else {
            self.female as f64 / total as f64
        }
    }

    /// male : female, `inf` without females, `NaN` when both are zero.
    pub fn male_to_female(&self) -> f64 {
        self.male as f64 / self.female as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionRow {
    pub cluster: usize,
    pub female: usize,
    pub male: usize,
    pub unknown: usize,
    /// male : female within the cluster.
    pub ratio: f64,
    /// Female count expected if the cluster mirrored the global proportion.
    pub expected_female: f64,
    pub deviation: f64,
    /// How far the cluster ratio departs from the global ratio, as a factor
    /// of at least 1 (`inf` for single-gender clusters).
    pub ratio_factor: f64,
}

fn ratio_factor(cluster: f64, global: f64) -> f64 {
    if cluster.is_nan() || global.is_nan() || global == 0.0 || global.is_infinite() {
        return f64::NAN;
    }
    if cluster == 0.0 || cluster.is_infinite() {
        return f64::INFINITY;
    }
    (cluster / global).max(global / cluster)
}

/// Gender make-up of every cluster against the global proportion. Expected
/// counts use the gendered members only; unknowns are reported but ignored.
pub fn composition_audit(
    assignments: &[usize],
    genders: &[Gender],
    global: GenderCounts,
) -> Vec<CompositionRow> {
    assert_eq!(assignments.len(), genders.len(), "one gender per assignment");
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![[0usize; 3]; k];
    for (&a, g) in assignments.iter().zip(genders) {
        let slot = match g {
            Gender::Female => 0,
            Gender::Male => 1,
            Gender::Unknown => 2,
        };
        counts[a][slot] += 1;
    }
    let fraction = global.female_fraction();
    let global_ratio = global.male_to_female();
    counts
        .into_iter()
        .enumerate()
        .map(|(cluster, [female, male, unknown])| {
            let local = GenderCounts { female, male };
            let expected_female = (female + male) as f64 * fraction;
            let ratio = local.male_to_female();
            CompositionRow {
                cluster,
                female,
                male,
                unknown,
                ratio,
                expected_female,
                deviation: (female as f64 - expected_female).abs(),
                ratio_factor: ratio_factor(ratio, global_ratio),
            }
        })
        .collect()
}
