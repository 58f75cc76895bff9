use std::path::{Path, PathBuf};

use clap::Args;
use vecopt::approximation::{run, Algorithm, MinimizerUpdate, RunConfig, RunStatus, SolveReport, VertexRule};
use vecopt::cones::ConeSpec;
use vecopt::geometry::write_dump;
use vecopt::verification::{certify, sample_upper_image, Certificate};
use vecopt::{catalog, Norm, ProblemSpec};

use crate::{read_file, write_file, CliError, CliResult, EXIT_OK, EXIT_UNCERTIFIED};

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Catalog name (ex8.1-q2, ex8.2, ...) or path to a problem JSON file.
    #[arg(long)]
    pub problem: String,
    /// Replaces the problem's cone: builtin name (orthant, C1..C4) or cone JSON file.
    #[arg(long)]
    pub cone: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// 1, 2 or inf.
    #[arg(long, default_value = "2")]
    pub norm: Norm,
    /// 1 or 2.
    #[arg(long, default_value = "1")]
    pub algorithm: Algorithm,
    /// first or farthest.
    #[arg(long, default_value = "first")]
    pub vertex_rule: VertexRule,
    /// Which scalarizations contribute minimizers: every or within-epsilon.
    #[arg(long, default_value = "every")]
    pub minimizers: MinimizerUpdate,
    #[arg(long)]
    pub alpha_margin: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
    /// Seed for the certification sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample size for --certify.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Directory for report.json, outer.txt, inner.txt and certificate.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Re-check the run against sampled points and the distance oracle.
    #[arg(long)]
    pub certify: bool,
}

impl SolveArgs {
    pub fn config(&self) -> RunConfig {
        let mut config = RunConfig::new(self.epsilon, self.norm, self.algorithm)
            .with_vertex_rule(self.vertex_rule)
            .with_minimizer_update(self.minimizers);
        config.alpha_margin = self.alpha_margin;
        config.max_iterations = self.max_iterations;
        config
    }
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || s.contains(std::path::MAIN_SEPARATOR)
}

/// Catalog name, or a JSON file when the argument looks like a path.
pub fn load_problem(spec: &str, cone: Option<&str>) -> CliResult<ProblemSpec> {
    let problem = match catalog(spec) {
        Ok(p) => p,
        Err(_) if looks_like_path(spec) || Path::new(spec).exists() => ProblemSpec::from_json(&read_file(Path::new(spec))?)?,
        Err(e) => return Err(e.into()),
    };
    let Some(cone) = cone else { return Ok(problem) };
    let spec = if looks_like_path(cone) {
        serde_json::from_str::<ConeSpec>(&read_file(Path::new(cone))?).map_err(vecopt::Error::from)?
    } else {
        ConeSpec::Name(cone.to_string())
    };
    let q = problem.q();
    let name = format!("{}+{}", problem.name(), if looks_like_path(cone) { "cone" } else { cone });
    Ok(problem.with_cone(spec.resolve(q)?)?.named(name))
}

pub fn report_json(report: &SolveReport) -> CliResult<String> {
    Ok(report.to_json()?)
}

fn write_outputs(dir: &Path, report: &SolveReport, cert: Option<&Certificate>) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::File { path: dir.to_path_buf(), source })?;
    write_file(&dir.join("report.json"), &report_json(report)?)?;
    write_file(&dir.join("outer.txt"), &report.outer.to_dump())?;
    write_file(&dir.join("inner.txt"), &write_dump(None, &report.inner))?;
    if let Some(c) = cert {
        write_file(&dir.join("certificate.json"), &c.to_json()?)?;
    }
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> CliResult<i32> {
    let config = args.config();
    config.validate()?;
    let problem = load_problem(&args.problem, args.cone.as_deref())?;
    let (report, error) = match run(&problem, &config) {
        Ok(r) => (r, None),
        Err(f) => (*f.partial, Some(f.error)),
    };
    let cert = if args.certify && error.is_none() {
        let cloud = sample_upper_image(&problem, args.samples, args.seed)?;
        Some(certify(&report, &problem, &cloud))
    } else {
        None
    };
    if let Some(dir) = &args.out {
        write_outputs(dir, &report, cert.as_ref())?;
    }
    if let Some(e) = error {
        return Err(e.into());
    }
    println!(
        "{} eps={} p={} alg={} status={:?} |X|={} opt={} en={} bound={:.6e} t={:.3}s",
        report.problem,
        config.epsilon,
        config.norm,
        config.algorithm,
        report.status,
        report.solution_set.len(),
        report.stats.opt_count,
        report.stats.en_count,
        report.certified_bound,
        report.timings.t_total
    );
    if let Some(c) = &cert {
        println!("certificate: {} ({} violations)", if c.pass { "pass" } else { "fail" }, c.violations.len());
    }
    let certified = report.status == RunStatus::Certified && cert.as_ref().is_none_or(|c| c.pass);
    Ok(if certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}
