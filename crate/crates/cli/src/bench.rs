use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use vecopt::approximation::{run, Algorithm, RunConfig, RunStatus};
use vecopt::{catalog, Norm, OrderingCone, ProblemSpec};

use crate::{CliError, CliResult, EXIT_ERROR, EXIT_OK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table1,
    Table2,
    Table3,
    Table4,
    All,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub suite: Suite,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One benchmark run.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchCase {
    pub problem: &'static str,
    pub cone: Option<&'static str>,
    pub epsilon: f64,
    pub norm: Norm,
    pub algorithm: Algorithm,
}

impl BenchCase {
    pub fn id(&self) -> String {
        match self.cone {
            Some(c) => format!("{}+{c}", self.problem),
            None => self.problem.to_string(),
        }
    }

    pub fn load(&self) -> vecopt::Result<ProblemSpec> {
        let p = catalog(self.problem)?;
        match self.cone {
            Some(c) => {
                let q = p.q();
                Ok(p.with_cone(OrderingCone::builtin(c, q)?)?.named(self.id()))
            }
            None => Ok(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub problem: String,
    pub epsilon: f64,
    pub p: Norm,
    pub algorithm: String,
    pub cardinality: usize,
    pub opt: usize,
    pub en: usize,
    pub t_opt: f64,
    pub t_en: f64,
    pub t_total: f64,
    pub certified_bound: f64,
    pub status: String,
}

fn grid(
    out: &mut Vec<BenchCase>,
    problem: &'static str,
    cone: Option<&'static str>,
    eps: &[f64],
    norms: &[Norm],
) {
    for &epsilon in eps {
        for &norm in norms {
            for algorithm in [Algorithm::Alg1, Algorithm::Alg2] {
                out.push(BenchCase { problem, cone, epsilon, norm, algorithm });
            }
        }
    }
}

pub fn cases(suite: Suite) -> Vec<BenchCase> {
    use Norm::*;
    let mut out = Vec::new();
    if matches!(suite, Suite::Table1 | Suite::All) {
        grid(&mut out, "ex8.1-q3", None, &[0.05, 0.01], &[L1, L2, LInf]);
        grid(&mut out, "ex8.1-q4", None, &[0.5, 0.1], &[L1, L2, LInf]);
    }
    if matches!(suite, Suite::Table2 | Suite::All) {
        grid(&mut out, "ex8.2", None, &[0.05, 0.01], &[L1, L2]);
    }
    if matches!(suite, Suite::Table3 | Suite::All) {
        grid(&mut out, "ex8.3a", None, &[10.0, 5.0], &[L2, LInf]);
        grid(&mut out, "ex8.3b", None, &[10.0, 5.0], &[L2, LInf]);
    }
    if matches!(suite, Suite::Table4 | Suite::All) {
        grid(&mut out, "ex8.1-q2", Some("C1"), &[0.005, 0.001], &[L2]);
        grid(&mut out, "ex8.1-q2", Some("C2"), &[0.005, 0.001], &[L2]);
        grid(&mut out, "ex8.1-q3", Some("C3"), &[0.05, 0.01], &[L2]);
        grid(&mut out, "ex8.1-q3", Some("C4"), &[0.05, 0.01], &[L2]);
    }
    out
}

pub fn run_case(case: &BenchCase) -> BenchRow {
    let mut row = BenchRow {
        problem: case.id(),
        epsilon: case.epsilon,
        p: case.norm,
        algorithm: case.algorithm.to_string(),
        cardinality: 0,
        opt: 0,
        en: 0,
        t_opt: 0.0,
        t_en: 0.0,
        t_total: 0.0,
        certified_bound: f64::INFINITY,
        status: "failed".into(),
    };
    let problem = match case.load() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}: {e}", row.problem);
            return row;
        }
    };
    let report = match run(&problem, &RunConfig::new(case.epsilon, case.norm, case.algorithm)) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("{} eps={} p={} alg={}: {}", row.problem, case.epsilon, case.norm, case.algorithm, f.error);
            *f.partial
        }
    };
    row.cardinality = report.solution_set.len();
    row.opt = report.stats.opt_count;
    row.en = report.stats.en_count;
    row.t_opt = report.timings.t_opt;
    row.t_en = report.timings.t_en;
    row.t_total = report.timings.t_total;
    row.certified_bound = report.certified_bound;
    row.status = match report.status {
        RunStatus::Certified => "certified",
        RunStatus::Uncertified => "uncertified",
        RunStatus::Failed => "failed",
    }
    .into();
    row
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<i32> {
    let sink: Box<dyn std::io::Write> = match &args.out {
        Some(path) => Box::new(
            std::fs::File::create(path).map_err(|source| CliError::File { path: path.clone(), source })?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    let mut succeeded = 0;
    for case in cases(args.suite) {
        let row = run_case(&case);
        if row.status != "failed" {
            succeeded += 1;
        }
        eprintln!(
            "{} eps={} p={} alg={}: |X|={} opt={} en={} {} ({:.2}s)",
            row.problem, row.epsilon, row.p, row.algorithm, row.cardinality, row.opt, row.en, row.status, row.t_total
        );
        writer.serialize(&row).map_err(|e| CliError::Other(e.to_string()))?;
        writer.flush().map_err(|e| CliError::Other(e.to_string()))?;
    }
    Ok(if succeeded > 0 { EXIT_OK } else { EXIT_ERROR })
}
