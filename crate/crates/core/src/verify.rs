//! Exact left-versus-right checks of catalog entries over parameter grids.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bigfib::{fib, lucas};
use crate::catalog::{CatalogEntry, Status};
use crate::dsl::{guard_to_string, Binding, EvalError, Evaluator, IdentitySpec};
use crate::golden::GoldenNum;

/// Failures kept per report; the total is always counted.
pub const MAX_STORED_FAILURES: usize = 64;
/// Counterexample lines printed per report.
pub const MAX_RENDERED_FAILURES: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("grid has no range for parameter `{param}` of `{id}`")]
    MissingParam { id: String, param: String },
    #[error("bad grid spec `{0}`: {1}")]
    BadGrid(String, String),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Inclusive ranges per parameter name, plus an optional cap on the
/// number of bindings enumerated per entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamGrid {
    ranges: Vec<(String, i64, i64)>,
    pub cap: Option<u64>,
}

impl ParamGrid {
    pub fn new() -> Self {
        ParamGrid::default()
    }

    pub fn with(mut self, name: &str, lo: i64, hi: i64) -> Self {
        self.set(name, lo, hi);
        self
    }

    pub fn set(&mut self, name: &str, lo: i64, hi: i64) {
        match self.ranges.iter_mut().find(|(n, ..)| n == name) {
            Some(slot) => *slot = (name.to_string(), lo, hi),
            None => self.ranges.push((name.to_string(), lo, hi)),
        }
    }

    pub fn range(&self, name: &str) -> Option<(i64, i64)> {
        self.ranges
            .iter()
            .find(|(n, ..)| n == name)
            .map(|(_, lo, hi)| (*lo, *hi))
    }

    pub fn ranges(&self) -> impl Iterator<Item = (&str, i64, i64)> {
        self.ranges.iter().map(|(n, lo, hi)| (n.as_str(), *lo, *hi))
    }

    /// The default policy: `n` spans [0,30] for the linear groups, [0,24]
    /// for G-Q and [0,16] for G-C and G-X; `j` spans [-3,3]; every other
    /// parameter spans [-6,6].
    pub fn default_for(entry: &CatalogEntry) -> ParamGrid {
        let n_hi = match entry.group.as_str() {
            "G-Q" => 24,
            "G-C" | "G-X" => 16,
            _ => 30,
        };
        let mut grid = ParamGrid::new();
        for p in &entry.spec.params {
            let (lo, hi) = match p.name.as_str() {
                "n" => (0, n_hi),
                "j" => (-3, 3),
                _ => (-6, 6),
            };
            grid.set(&p.name, lo, hi);
        }
        grid
    }

    /// `self` with every range of `other` laid over it. Ranges for names
    /// `self` does not mention are ignored; `other`'s cap wins if set.
    pub fn overridden_by(mut self, other: &ParamGrid) -> ParamGrid {
        for (name, lo, hi) in other.ranges() {
            if self.range(name).is_some() {
                self.set(name, lo, hi);
            }
        }
        if other.cap.is_some() {
            self.cap = other.cap;
        }
        self
    }
}

impl fmt::Display for ParamGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .ranges
            .iter()
            .map(|(n, lo, hi)| format!("{n}={lo}..{hi}"))
            .collect();
        if let Some(cap) = self.cap {
            parts.push(format!("cap={cap}"));
        }
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for ParamGrid {
    type Err = VerifyError;

    /// Parses `n=0..30;s=-6..6;j=-3..3`, optionally with `cap=N`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| VerifyError::BadGrid(text.to_string(), why.to_string());
        let mut grid = ParamGrid::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, range) = part.split_once('=').ok_or_else(|| bad("expected name=lo..hi"))?;
            let name = name.trim();
            if name == "cap" {
                grid.cap = Some(range.trim().parse().map_err(|_| bad("cap is not a count"))?);
                continue;
            }
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(bad("bad parameter name"));
            }
            let (lo, hi) = match range.split_once("..") {
                Some((lo, hi)) => (lo.trim(), hi.trim()),
                None => (range.trim(), range.trim()),
            };
            let lo: i64 = lo.parse().map_err(|_| bad("bound is not an integer"))?;
            let hi: i64 = hi.parse().map_err(|_| bad("bound is not an integer"))?;
            if lo > hi {
                return Err(bad("empty range"));
            }
            grid.set(name, lo, hi);
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One binding where the sides differ, or where evaluation failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub binding: Binding,
    pub lhs: Option<GoldenNum>,
    pub rhs: Option<GoldenNum>,
    pub error: Option<String>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}:", self.binding)?;
        if let Some(l) = &self.lhs {
            write!(f, " lhs={l}")?;
        }
        if let Some(r) = &self.rhs {
            write!(f, " rhs={r}")?;
        }
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub id: String,
    pub status: Status,
    pub grid: ParamGrid,
    pub cases_checked: u64,
    pub cases_skipped: u64,
    pub failure_count: u64,
    /// The first [`MAX_STORED_FAILURES`] failures in grid order.
    pub failures: Vec<Failure>,
    pub diagnostics: Vec<String>,
}

impl VerificationReport {
    pub fn verdict(&self) -> Verdict {
        if self.failure_count == 0 && self.cases_checked >= 1 {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    /// `<status> <id> cases=<n> skipped=<m>` plus counterexample and note lines.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} {} cases={} skipped={}\n",
            self.verdict(),
            self.id,
            self.cases_checked,
            self.cases_skipped
        );
        for f in self.failures.iter().take(MAX_RENDERED_FAILURES) {
            writeln!(out, "  {f}").unwrap();
        }
        if self.failure_count > MAX_RENDERED_FAILURES as u64 {
            writeln!(out, "  ... {} failing cases in total", self.failure_count).unwrap();
        }
        for d in &self.diagnostics {
            writeln!(out, "  note: {d}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct FailureJson<'a> {
            binding: serde_json::Map<String, serde_json::Value>,
            lhs: Option<String>,
            rhs: Option<String>,
            error: Option<&'a str>,
        }
        let failures: Vec<FailureJson> = self
            .failures
            .iter()
            .map(|f| FailureJson {
                binding: f.binding.iter().map(|(n, v)| (n.to_string(), v.into())).collect(),
                lhs: f.lhs.as_ref().map(|g| g.to_string()),
                rhs: f.rhs.as_ref().map(|g| g.to_string()),
                error: f.error.as_deref(),
            })
            .collect();
        serde_json::json!({
            "id": self.id,
            "verdict": self.verdict(),
            "entry_status": self.status,
            "grid": self.grid.to_string(),
            "cases_checked": self.cases_checked,
            "cases_skipped": self.cases_skipped,
            "failure_count": self.failure_count,
            "failures": failures,
            "diagnostics": self.diagnostics,
        })
    }
}

enum Outcome {
    Skipped,
    Agree(usize),
    Failed(Box<Failure>),
}

fn check_case(ev: &mut Evaluator, spec: &IdentitySpec, env: Binding) -> Outcome {
    let fail = |env: Binding, lhs, rhs, err: Option<EvalError>| {
        Outcome::Failed(Box::new(Failure {
            binding: env,
            lhs,
            rhs,
            error: err.map(|e| e.to_string()),
        }))
    };
    match ev.admissible(spec, &env) {
        Ok(true) => {}
        Ok(false) => return Outcome::Skipped,
        Err(e) => return fail(env, None, None, Some(e)),
    }
    let case = match ev.active_case(spec, &env) {
        Ok(c) => c,
        Err(e) => return fail(env, None, None, Some(e)),
    };
    let lhs = match ev.eval_value(&spec.lhs, &env) {
        Ok(v) => v,
        Err(e) => return fail(env, None, None, Some(e)),
    };
    let rhs = match ev.eval_value(&spec.rhs[case].expr, &env) {
        Ok(v) => v,
        Err(e) => return fail(env, Some(lhs.into_golden()), None, Some(e)),
    };
    if lhs.same(&rhs) {
        Outcome::Agree(case)
    } else {
        fail(env, Some(lhs.into_golden()), Some(rhs.into_golden()), None)
    }
}

/// `(name, lo, hi)` for each parameter, in declaration order.
type Axes = Vec<(String, i64, i64)>;

/// The bindings of `grid` for `spec`, in row-major order over the declared
/// parameters (last parameter fastest), after intersecting each range with
/// the parameter's domain. `None` if some intersection is empty.
fn axes(spec: &IdentitySpec, grid: &ParamGrid) -> Result<Option<Axes>, VerifyError> {
    let mut out = Vec::with_capacity(spec.params.len());
    for p in &spec.params {
        let (lo, hi) = grid.range(&p.name).ok_or_else(|| VerifyError::MissingParam {
            id: spec.id.clone(),
            param: p.name.clone(),
        })?;
        match p.domain.clip(lo, hi) {
            Some((lo, hi)) => out.push((p.name.clone(), lo, hi)),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn binding_at(axes: &[(String, i64, i64)], mut index: u64) -> Binding {
    let mut values = vec![0i64; axes.len()];
    for (slot, (_, lo, hi)) in values.iter_mut().zip(axes).rev() {
        let width = (hi - lo + 1) as u64;
        *slot = lo + (index % width) as i64;
        index /= width;
    }
    let mut b = Binding::new();
    for ((name, ..), v) in axes.iter().zip(values) {
        b.set(name, v);
    }
    b
}

/// Checks `entry` on every binding of `grid`. Evaluation errors become
/// failures. Cases run on the ambient rayon pool.
pub fn verify_entry(entry: &CatalogEntry, grid: &ParamGrid) -> Result<VerificationReport, VerifyError> {
    verify_entry_in(entry, grid, true)
}

fn verify_entry_in(entry: &CatalogEntry, grid: &ParamGrid, parallel: bool) -> Result<VerificationReport, VerifyError> {
    let spec = &entry.spec;
    let mut report = VerificationReport {
        id: entry.qualified_id(),
        status: entry.status,
        grid: grid.clone(),
        cases_checked: 0,
        cases_skipped: 0,
        failure_count: 0,
        failures: Vec::new(),
        diagnostics: Vec::new(),
    };
    let Some(axes) = axes(spec, grid)? else {
        report.diagnostics.push("empty grid".to_string());
        return Ok(report);
    };
    let total: u64 = axes.iter().map(|(_, lo, hi)| (hi - lo + 1) as u64).product();
    let picks = match grid.cap {
        Some(cap) if cap < total => cap,
        _ => total,
    };
    // evenly spaced when capped, so every region of the grid is sampled
    let index = |i: u64| {
        if picks == total {
            i
        } else {
            (i as u128 * total as u128 / picks as u128) as u64
        }
    };

    let outcomes: Vec<Outcome> = if parallel {
        (0..picks)
            .into_par_iter()
            .map_init(Evaluator::new, |ev, i| {
                check_case(ev, spec, binding_at(&axes, index(i)))
            })
            .collect()
    } else {
        let mut ev = Evaluator::new();
        (0..picks)
            .map(|i| check_case(&mut ev, spec, binding_at(&axes, index(i))))
            .collect()
    };

    let mut hit = BTreeSet::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Skipped => report.cases_skipped += 1,
            Outcome::Agree(case) => {
                report.cases_checked += 1;
                hit.insert(case);
            }
            Outcome::Failed(f) => {
                report.cases_checked += 1;
                report.failure_count += 1;
                if report.failures.len() < MAX_STORED_FAILURES {
                    report.failures.push(*f);
                }
            }
        }
    }
    if report.cases_checked == 0 {
        report.diagnostics.push("empty grid".to_string());
    }
    if spec.is_piecewise() && report.cases_checked > 0 {
        for (i, case) in spec.rhs.iter().enumerate() {
            if !hit.contains(&i) && report.failure_count == 0 {
                report
                    .diagnostics
                    .push(format!("branch uncovered: {}", guard_to_string(&case.guard)));
            }
        }
    }
    Ok(report)
}

/// Verifies every entry on its default grid overlaid with `overrides`.
/// Reports come back in the order of `entries` whatever `workers` is;
/// `workers == 1` runs on the calling thread.
pub fn verify_all(
    entries: &[CatalogEntry],
    overrides: &ParamGrid,
    workers: usize,
) -> Result<Vec<VerificationReport>, VerifyError> {
    let run = |parallel: bool| {
        entries
            .iter()
            .map(|e| verify_entry_in(e, &ParamGrid::default_for(e).overridden_by(overrides), parallel))
            .collect::<Result<Vec<_>, _>>()
    };
    if workers == 1 {
        return run(false);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| VerifyError::Pool(e.to_string()))?;
    pool.install(|| run(true))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BinetError {
    #[error("z = 0 with negative exponent {0}")]
    ZeroWithNegativeExponent(i64),
    #[error("{0} indices for {1} coefficients")]
    LengthMismatch(usize, usize),
}

/// `h(w) = sum of g * w^f` over `coeffs`.
pub fn transform_h(coeffs: &[(GoldenNum, i64)], w: &GoldenNum) -> Result<GoldenNum, BinetError> {
    let mut acc = GoldenNum::zero();
    for (g, f) in coeffs {
        let p = w.pow(*f).map_err(|_| BinetError::ZeroWithNegativeExponent(*f))?;
        acc += &(g * &p);
    }
    Ok(acc)
}

/// With `h` as in [`transform_h`], checks
/// `sqrt5 * sum g z^f F(j f) = h(alpha^j z) - h(beta^j z)` and
/// `sum g z^f L(j f) = h(alpha^j z) + h(beta^j z)`.
pub fn check_binet_transform(coeffs: &[(GoldenNum, i64)], j: i64, z: &GoldenNum) -> Result<bool, BinetError> {
    let indices: Vec<i64> = coeffs.iter().map(|(_, f)| j * f).collect();
    check_binet_indices(coeffs, &indices, j, z)
}

/// As [`check_binet_transform`] but with the sequence index of each term
/// given explicitly instead of `j * f`. Any index other than `j * f` on a
/// term with non-zero `g z^f` makes the check fail.
pub fn check_binet_indices(
    coeffs: &[(GoldenNum, i64)],
    indices: &[i64],
    j: i64,
    z: &GoldenNum,
) -> Result<bool, BinetError> {
    if indices.len() != coeffs.len() {
        return Err(BinetError::LengthMismatch(indices.len(), coeffs.len()));
    }
    let mut f_side = GoldenNum::zero();
    let mut l_side = GoldenNum::zero();
    for ((g, f), &m) in coeffs.iter().zip(indices) {
        let w = g * &z.pow(*f).map_err(|_| BinetError::ZeroWithNegativeExponent(*f))?;
        f_side += &(&w * &GoldenNum::from_integer(fib(m)));
        l_side += &(&w * &GoldenNum::from_integer(lucas(m)));
    }
    f_side *= &GoldenNum::sqrt5();
    let ha = transform_h(coeffs, &(&crate::golden::alpha_pow(j) * z))?;
    let hb = transform_h(coeffs, &(&crate::golden::beta_pow(j) * z))?;
    Ok(f_side == &ha - &hb && l_side == &ha + &hb)
}
