//! Strip seeds for propagated nets, read from CSV with columns `k,re,im`.

use std::path::Path;

use serde::Deserialize;

use crate::config::C2;
use crate::error::{validation, JobError};

#[derive(Debug, Deserialize)]
struct SeedRow {
    k: i64,
    re: f64,
    im: f64,
}

/// Seeds `g(k, t_min)` for `k = k_min + 1 ..= k_max`, in that order.
pub fn parse_seed_strips(text: &str, k_min: i64, k_max: i64) -> Result<Vec<C2>, JobError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows: Vec<SeedRow> = Vec::new();
    for r in rdr.deserialize() {
        rows.push(r.map_err(|e| validation(format!("seed file: {e}")))?);
    }
    rows.sort_by_key(|r| r.k);
    let want: Vec<i64> = (k_min + 1..=k_max).collect();
    let got: Vec<i64> = rows.iter().map(|r| r.k).collect();
    if got != want {
        return Err(validation(format!("seed file must list k = {}..={} once each, got {got:?}", k_min + 1, k_max)));
    }
    Ok(rows.iter().map(|r| [r.re, r.im]).collect())
}

pub fn read_seed_strips(path: &Path, k_min: i64, k_max: i64) -> Result<Vec<C2>, JobError> {
    let text = std::fs::read_to_string(path).map_err(|e| JobError::io(path, e))?;
    parse_seed_strips(&text, k_min, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_orders() {
        let s = parse_seed_strips("k,re,im\n2, 0.5, 0.1\n1, 0.2, 0\n", 0, 2).unwrap();
        assert_eq!(s, vec![[0.2, 0.0], [0.5, 0.1]]);
    }

    #[test]
    fn rejects_gaps_and_duplicates() {
        assert_eq!(parse_seed_strips("k,re,im\n2,0,0\n", 0, 2).unwrap_err().exit_code(), 2);
        assert!(parse_seed_strips("k,re,im\n1,0,0\n1,0,0\n", 0, 1).is_err());
        assert!(parse_seed_strips("k,re\n1,0\n", 0, 1).is_err());
    }
}
