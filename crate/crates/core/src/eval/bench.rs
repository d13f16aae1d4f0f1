use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::matcher::ConceptRecord;
use crate::ontology::OntologyClosure;
use crate::reasoner::classify_dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BenchScope {
    ReasonerOnly,
    Full,
}

impl fmt::Display for BenchScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchScope::ReasonerOnly => "REASONER_ONLY",
            BenchScope::Full => "FULL",
        })
    }
}

impl FromStr for BenchScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "REASONER_ONLY" | "REASONER" => Ok(BenchScope::ReasonerOnly),
            "FULL" => Ok(BenchScope::Full),
            _ => Err(format!("unknown bench scope `{s}` (expected reasoner_only or full)")),
        }
    }
}

/// Something that can process the first `size` records of a dataset.
pub trait Workload {
    fn available(&self) -> usize;
    fn run(&mut self, size: usize) -> Result<(), String>;
}

/// Classification of prebuilt concept records over a prebuilt closure.
pub struct ReasonerWorkload<'a> {
    pub closure: &'a OntologyClosure,
    pub records: &'a [ConceptRecord],
}

impl Workload for ReasonerWorkload<'_> {
    fn available(&self) -> usize {
        self.records.len()
    }

    fn run(&mut self, size: usize) -> Result<(), String> {
        let (out, _) = classify_dataset(&self.records[..size], self.closure).map_err(|e| e.to_string())?;
        std::hint::black_box(out);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub scope: BenchScope,
    pub run: usize,
    pub millis: f64,
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl LinearFit {
    /// Requires at least two distinct x values. A constant `y` is fit
    /// perfectly and reports R² = 1.
    pub fn fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return None;
        }
        let mx = xs.iter().sum::<f64>() / n as f64;
        let my = ys.iter().sum::<f64>() / n as f64;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let ss_res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
            .sum();
        let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
        Some(LinearFit {
            slope,
            intercept,
            r_squared,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub scope: BenchScope,
    pub runs: usize,
    pub rows: Vec<BenchRow>,
    /// `(size, median millis)` in the order the sizes were given.
    pub medians: Vec<(usize, f64)>,
    /// Fit of median millis against size; absent with fewer than two sizes.
    pub fit: Option<LinearFit>,
}

impl BenchResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("size,scope,run,millis\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{:.3}", r.size, r.scope, r.run, r.millis);
        }
        out
    }

    pub fn median(&self, size: usize) -> Option<f64> {
        self.medians.iter().find(|(s, _)| *s == size).map(|(_, m)| *m)
    }
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>, EvalError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| EvalError::InvalidSizes(format!("`{}` is not a size", p.trim())))
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Time `runs` sequential executions per size, after one untimed warm-up.
pub fn bench<W: Workload>(
    sizes: &[usize],
    scope: BenchScope,
    runs: usize,
    workload: &mut W,
) -> Result<BenchResult, EvalError> {
    if sizes.is_empty() {
        return Err(EvalError::InvalidSizes("no sizes given".into()));
    }
    if sizes.contains(&0) {
        return Err(EvalError::InvalidSizes("sizes must be positive".into()));
    }
    if runs < 3 {
        return Err(EvalError::TooFewRuns(runs));
    }
    let available = workload.available();
    if let Some(&size) = sizes.iter().find(|&&s| s > available) {
        return Err(EvalError::InsufficientData { size, available });
    }
    let largest = *sizes.iter().max().expect("non-empty");
    workload.run(largest).map_err(EvalError::Workload)?;

    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for &size in sizes {
        let mut times = Vec::with_capacity(runs);
        for run in 1..=runs {
            let start = Instant::now();
            workload.run(size).map_err(EvalError::Workload)?;
            let millis = start.elapsed().as_secs_f64() * 1000.0;
            times.push(millis);
            rows.push(BenchRow {
                size,
                scope,
                run,
                millis,
            });
        }
        medians.push((size, median(times)));
    }
    let xs: Vec<f64> = medians.iter().map(|(s, _)| *s as f64).collect();
    let ys: Vec<f64> = medians.iter().map(|(_, m)| *m).collect();
    Ok(BenchResult {
        scope,
        runs,
        rows,
        fit: LinearFit::fit(&xs, &ys),
        medians,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Spin(usize);

    impl Workload for Spin {
        fn available(&self) -> usize {
            self.0
        }
        fn run(&mut self, size: usize) -> Result<(), String> {
            std::hint::black_box((0..size).sum::<usize>());
            Ok(())
        }
    }

    #[test]
    fn validation() {
        let mut w = Spin(100);
        assert!(matches!(bench(&[0], BenchScope::Full, 3, &mut w), Err(EvalError::InvalidSizes(_))));
        assert!(matches!(bench(&[], BenchScope::Full, 3, &mut w), Err(EvalError::InvalidSizes(_))));
        assert_eq!(
            bench(&[101], BenchScope::Full, 3, &mut w),
            Err(EvalError::InsufficientData { size: 101, available: 100 })
        );
        assert_eq!(bench(&[1], BenchScope::Full, 2, &mut w), Err(EvalError::TooFewRuns(2)));
    }

    #[test]
    fn csv_shape() {
        let r = bench(&[10, 20, 30, 40], BenchScope::ReasonerOnly, 3, &mut Spin(40)).unwrap();
        let csv = r.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "size,scope,run,millis");
        assert_eq!(lines.len(), 1 + 4 * 3);
        assert!(lines[1].starts_with("10,REASONER_ONLY,1,"));
        assert_eq!(r.medians.len(), 4);
        assert!(r.fit.is_some());
    }

    #[test]
    fn exact_line() {
        let f = LinearFit::fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(LinearFit::fit(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_sizes("500, 1000,1500").unwrap(), vec![500, 1000, 1500]);
        assert!(parse_sizes("5x").is_err());
    }
}
