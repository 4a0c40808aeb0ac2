use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::record::PostRecord;
use crate::error::{CoreError, Result};

pub const MIN_SPLIT_RECORDS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<PostRecord>,
    pub val: Vec<PostRecord>,
    pub test: Vec<PostRecord>,
    pub seed: u64,
}

impl DatasetSplit {
    /// Everything in `train`, nothing held out.
    pub fn train_only(train: Vec<PostRecord>, seed: u64) -> Self {
        Self {
            train,
            val: Vec::new(),
            test: Vec::new(),
            seed,
        }
    }
}

/// Seeded shuffle, then `n/10` rounded half down records each to
/// validation and test; the remainder trains. Plain flooring would leave
/// train up to 1.8 records off 80% (17/1/1 for 19 records).
pub fn split_dataset(records: Vec<PostRecord>, seed: u64) -> Result<DatasetSplit> {
    let n = records.len();
    if n < MIN_SPLIT_RECORDS {
        return Err(CoreError::TooFewRecords {
            needed: MIN_SPLIT_RECORDS,
            got: n,
        });
    }
    let mut ids = HashSet::new();
    if let Some(r) = records.iter().find(|r| !ids.insert(r.id.as_str())) {
        return Err(CoreError::Record {
            id: r.id.clone(),
            message: "duplicate id".into(),
        });
    }
    let mut shuffled = records;
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let held = (n + 4) / 10;
    let test = shuffled.split_off(n - held);
    let val = shuffled.split_off(n - 2 * held);
    Ok(DatasetSplit {
        train: shuffled,
        val,
        test,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn recs(n: usize) -> Vec<PostRecord> {
        (0..n)
            .map(|i| PostRecord {
                id: format!("p{i}"),
                raw_text: String::new(),
                tokens: vec![],
                regions: vec![],
                attributes: vec![],
                label: None,
                has_person: None,
            })
            .collect()
    }

    fn sizes(s: &DatasetSplit) -> (usize, usize, usize) {
        (s.train.len(), s.val.len(), s.test.len())
    }

    #[test]
    fn proportions() {
        assert_eq!(sizes(&split_dataset(recs(100), 1).unwrap()), (80, 10, 10));
        assert_eq!(sizes(&split_dataset(recs(12), 1).unwrap()), (10, 1, 1));
        assert_eq!(sizes(&split_dataset(recs(19), 1).unwrap()), (15, 2, 2));
        assert_eq!(sizes(&split_dataset(recs(15), 1).unwrap()), (13, 1, 1));
    }

    #[test]
    fn deterministic_and_disjoint() {
        let a = split_dataset(recs(57), 9).unwrap();
        assert_eq!(a, split_dataset(recs(57), 9).unwrap());
        assert_ne!(a, split_dataset(recs(57), 10).unwrap());
        let mut all: Vec<_> = a.train.iter().chain(&a.val).chain(&a.test).map(|r| r.id.clone()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 57);
    }

    #[test]
    fn too_few() {
        assert!(matches!(
            split_dataset(recs(9), 0),
            Err(CoreError::TooFewRecords { needed: 10, got: 9 })
        ));
    }
}
