use std::io::{BufRead, Write};

use super::Moments;
use crate::error::{Error, Result};

pub const STATS_CSV_HEADER: &str = "scheme,J,D,f,K,M,n_trials,mean,bias,variance,mse,stderr";

/// Monte Carlo summary of one scheme on one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub scheme: String,
    pub j_true: f64,
    pub dim: usize,
    pub union: usize,
    pub bins: usize,
    pub hashes: usize,
    pub n_trials: u64,
    pub mean: f64,
    pub bias: f64,
    /// Population variance of the estimates.
    pub variance: f64,
    /// `variance + bias²`.
    pub mse: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
}

impl TrialStats {
    #[allow(clippy::too_many_arguments)]
    pub fn from_moments(
        scheme: impl Into<String>,
        j_true: f64,
        dim: usize,
        union: usize,
        bins: usize,
        hashes: usize,
        moments: &Moments,
    ) -> Self {
        let bias = moments.mean() - j_true;
        let variance = moments.variance();
        Self {
            scheme: scheme.into(),
            j_true,
            dim,
            union,
            bins,
            hashes,
            n_trials: moments.count(),
            mean: moments.mean(),
            bias,
            variance,
            mse: variance + bias * bias,
            std_error: moments.std_error(),
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.j_true,
            self.dim,
            self.union,
            self.bins,
            self.hashes,
            self.n_trials,
            self.mean,
            self.bias,
            self.variance,
            self.mse,
            self.std_error
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let fields: Vec<&str> = row.trim_end().split(',').collect();
        if fields.len() != 12 {
            return Err(Error::Format(format!("expected 12 fields in {row:?}")));
        }
        let bad = |i: usize| Error::Format(format!("bad field {} in {row:?}", i + 1));
        let float = |i: usize| fields[i].parse::<f64>().map_err(|_| bad(i));
        let int = |i: usize| fields[i].parse::<u64>().map_err(|_| bad(i));
        Ok(Self {
            scheme: fields[0].to_string(),
            j_true: float(1)?,
            dim: int(2)? as usize,
            union: int(3)? as usize,
            bins: int(4)? as usize,
            hashes: int(5)? as usize,
            n_trials: int(6)?,
            mean: float(7)?,
            bias: float(8)?,
            variance: float(9)?,
            mse: float(10)?,
            std_error: float(11)?,
        })
    }
}

pub fn write_stats_csv<W: Write>(out: &mut W, rows: &[TrialStats]) -> Result<()> {
    writeln!(out, "{STATS_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv_row())?;
    }
    Ok(())
}

pub fn read_stats_csv<R: BufRead>(input: R) -> Result<Vec<TrialStats>> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if (i == 0 && line.trim() == STATS_CSV_HEADER) || line.trim().is_empty() {
            continue;
        }
        rows.push(TrialStats::from_csv_row(&line)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_and_mse_identity() {
        let m: Moments = [0.1, 0.4, 0.35, 0.2, 0.33].into_iter().collect();
        let s = TrialStats::from_moments("coph-sigma-pi", 1.0 / 3.0, 64, 24, 4, 4, &m);
        assert!((s.mse - (s.variance + s.bias * s.bias)).abs() <= 1e-12 * s.mse);
        let mut buf = Vec::new();
        write_stats_csv(&mut buf, &[s.clone(), s.clone()]).unwrap();
        let back = read_stats_csv(&buf[..]).unwrap();
        assert_eq!(back, vec![s.clone(), s]);
        assert!(TrialStats::from_csv_row("a,b").is_err());
    }
}
