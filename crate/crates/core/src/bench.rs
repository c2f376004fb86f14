//! Timing harness: fast doubling against the linear recurrence, and the
//! closed right-hand side of a catalog entry against its summed left side.
//!
//! Every record carries a digest of the computed value so competing
//! strategies can be checked for agreement.

use std::fmt::Write as _;
use std::time::Instant;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bigfib::{fib, fib_iterative};
use crate::catalog::{Catalog, CatalogError};
use crate::dsl::{Binding, EvalError, Evaluator};

pub const CSV_HEADER: &str = "subject,n,reps,median_ns,digest";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub subject: String,
    pub n: i64,
    pub reps: usize,
    pub median_ns: u128,
    pub digest: String,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("at least 3 repetitions are needed, got {0}")]
    TooFewReps(usize),
    #[error("n must be non-negative, got {0}")]
    NegativeN(i64),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("`{0}` has no parameter n")]
    NoParameterN(String),
    #[error("no binding of `{0}` with the other parameters at 1 or 0 satisfies its guards")]
    NoBinding(String),
    #[error("`{id}` at {binding}: {source}")]
    Eval {
        id: String,
        binding: Binding,
        source: EvalError,
    },
    #[error("digests differ for {subject} at n={n}: {a} vs {b}")]
    DigestMismatch {
        subject: String,
        n: i64,
        a: String,
        b: String,
    },
}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().take(8).fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

fn median(mut samples: Vec<u128>) -> u128 {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

/// Runs `f` `reps` times and returns the median time and the rendering of
/// the last result.
fn time<T: ToString, E>(reps: usize, mut f: impl FnMut() -> Result<T, E>) -> Result<(u128, String), E> {
    let mut samples = Vec::with_capacity(reps);
    let mut last = String::new();
    for _ in 0..reps {
        let start = Instant::now();
        let value = f()?;
        samples.push(start.elapsed().as_nanos());
        last = value.to_string();
    }
    Ok((median(samples), last))
}

fn check_reps(reps: usize) -> Result<(), BenchError> {
    if reps < 3 {
        return Err(BenchError::TooFewReps(reps));
    }
    Ok(())
}

/// Two records per `n`: `fib-iterative` then `fib-fast-doubling`.
pub fn bench_fib(ns: &[i64], reps: usize) -> Result<Vec<BenchRecord>, BenchError> {
    check_reps(reps)?;
    let mut out = Vec::with_capacity(ns.len() * 2);
    for &n in ns {
        if n < 0 {
            return Err(BenchError::NegativeN(n));
        }
        let (slow_ns, slow) = time(reps, || Ok::<_, BenchError>(fib_iterative(n as u64)))?;
        let (fast_ns, fast) = time(reps, || Ok::<_, BenchError>(fib(n)))?;
        let (a, b) = (digest(&slow), digest(&fast));
        if a != b {
            return Err(BenchError::DigestMismatch {
                subject: "fib".into(),
                n,
                a,
                b,
            });
        }
        out.push(BenchRecord {
            subject: "fib-iterative".into(),
            n,
            reps,
            median_ns: slow_ns,
            digest: a,
        });
        out.push(BenchRecord {
            subject: "fib-fast-doubling".into(),
            n,
            reps,
            median_ns: fast_ns,
            digest: b,
        });
    }
    Ok(out)
}

/// The binding used to bench `id` at `n`: every other parameter at 1, or at
/// 0 when 1 is outside its domain or breaks a guard.
fn bench_binding(catalog: &Catalog, id: &str, n: i64) -> Result<Binding, BenchError> {
    let entry = catalog.entry(id)?;
    let spec = &entry.spec;
    if spec.param("n").is_none() {
        return Err(BenchError::NoParameterN(id.to_string()));
    }
    let others: Vec<&str> = spec
        .params
        .iter()
        .map(|p| p.name.as_str())
        .filter(|p| *p != "n")
        .collect();
    let mut ev = Evaluator::new();
    // try all-ones first, then turn parameters to 0 one at a time
    for zeros in 0..=others.len() {
        let mut b = Binding::new().with("n", n);
        for (i, p) in others.iter().enumerate() {
            b.set(p, if i < zeros { 0 } else { 1 });
        }
        if ev.admissible(spec, &b).unwrap_or(false) && ev.active_case(spec, &b).is_ok() {
            return Ok(b);
        }
    }
    Err(BenchError::NoBinding(id.to_string()))
}

/// Times the left side (`<id>-lhs`) and right side (`<id>-rhs`) of a catalog
/// entry at `n`. Both are evaluated from scratch on every repetition.
pub fn bench_entry(catalog: &Catalog, id: &str, n: i64, reps: usize) -> Result<(BenchRecord, BenchRecord), BenchError> {
    check_reps(reps)?;
    let binding = bench_binding(catalog, id, n)?;
    let entry = catalog.entry(id)?;
    let spec = &entry.spec;
    let eval_err = |source| BenchError::Eval {
        id: id.to_string(),
        binding: binding.clone(),
        source,
    };

    let (lhs_ns, lhs) = time(reps, || Evaluator::new().eval(&spec.lhs, &binding)).map_err(eval_err)?;
    let (rhs_ns, rhs) = time(reps, || {
        let mut ev = Evaluator::new();
        let case = ev.active_case(spec, &binding)?;
        ev.eval(&spec.rhs[case].expr, &binding)
    })
    .map_err(eval_err)?;
    let (a, b) = (digest(&lhs), digest(&rhs));
    if a != b {
        return Err(BenchError::DigestMismatch {
            subject: id.to_string(),
            n,
            a,
            b,
        });
    }
    let record = |side: &str, median_ns, digest| BenchRecord {
        subject: format!("{}-{side}", entry.id()),
        n,
        reps,
        median_ns,
        digest,
    };
    Ok((record("lhs", lhs_ns, a), record("rhs", rhs_ns, b)))
}

/// Header line plus one row per record, LF-terminated.
pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in records {
        writeln!(out, "{},{},{},{},{}", r.subject, r.n, r.reps, r.median_ns, r.digest).unwrap();
    }
    out
}

/// Roughly log-spaced sizes from `lo` to `hi`, three per decade.
pub fn log_spaced(lo: i64, hi: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut decade = 1i64;
    while decade <= hi {
        for m in [1, 2, 5] {
            let v = decade.saturating_mul(m);
            if (lo..=hi).contains(&v) {
                out.push(v);
            }
        }
        decade = decade.saturating_mul(10);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::parse_catalog_text;
    use std::path::Path;

    fn catalog() -> Catalog {
        let text = "# group: G-P1\n# source: test\n\
            identity T2F { params n in 0..., s in int;\n\
              lhs = 2*sum(k=0..fdiv(n,2); C(n,2*k)*F(2*k+s));\n\
              rhs = F(2*n+s) - (-1)^(s)*F(n-s) }\n\
            # source: test 2\n\
            identity odd { params n in 1..., r in int; require odd(n + r); lhs = n; rhs = n }\n\
            # source: test 3\n\
            identity nullary { lhs = 1; rhs = 1 }\n";
        Catalog {
            entries: parse_catalog_text(text, Path::new("t.fib")).unwrap(),
            warnings: vec![],
        }
    }

    #[test]
    fn fib_records_agree() {
        let records = bench_fib(&[0, 1, 90], 3).unwrap();
        assert_eq!(records.len(), 6);
        assert_eq!(records[4].digest, records[5].digest);
        assert_eq!(records[4].digest, digest("2880067194370816120"));
        let csv = to_csv(&records);
        assert!(csv.starts_with("subject,n,reps,median_ns,digest\nfib-iterative,0,3,"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn reps_and_sizes_are_checked() {
        assert!(matches!(bench_fib(&[10], 2), Err(BenchError::TooFewReps(2))));
        assert!(matches!(bench_fib(&[-1], 3), Err(BenchError::NegativeN(-1))));
    }

    #[test]
    fn entry_sides_agree() {
        let c = catalog();
        let (l, r) = bench_entry(&c, "T2F", 200, 3).unwrap();
        assert_eq!((l.subject.as_str(), r.subject.as_str()), ("T2F-lhs", "T2F-rhs"));
        assert_eq!(l.digest, r.digest);
    }

    #[test]
    fn guard_falls_back_to_zero() {
        let c = catalog();
        assert_eq!(bench_binding(&c, "odd", 4).unwrap().get("r"), Some(1));
        assert_eq!(bench_binding(&c, "odd", 5).unwrap().get("r"), Some(0));
    }

    #[test]
    fn entry_errors() {
        let c = catalog();
        assert!(matches!(
            bench_entry(&c, "nope", 10, 3),
            Err(BenchError::Catalog(CatalogError::UnknownId { .. }))
        ));
        assert!(matches!(
            bench_entry(&c, "nullary", 10, 3),
            Err(BenchError::NoParameterN(_))
        ));
    }

    #[test]
    fn log_spacing() {
        assert_eq!(
            log_spaced(1000, 100_000),
            vec![1000, 2000, 5000, 10_000, 20_000, 50_000, 100_000]
        );
    }
}
