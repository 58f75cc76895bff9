//! Outer approximation of the upper image: the basic cutting loop and the
//! variant that enumerates vertices inside a bounding slab.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex_solver::{self, Constraint, ConvexProgram, SocConstraint, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::{GeometryTolerances, Halfspace, Polyhedron, VRep};
use crate::norm::Norm;
use crate::problem::{ProblemSpec, QuadraticFunction};
use crate::scalarization::{supporting_halfspace, ScalarizationResult, Scalarizer, DISTANCE_TOL};
use crate::vecops::{dot, linf_dist, norm2, scale};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Cut at the first vertex farther than ε, re-enumerate, repeat.
    Alg1,
    /// Refine around the initial vertices, then enumerate inside a slab.
    Alg2,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "alg1" => Ok(Algorithm::Alg1),
            "2" | "alg2" => Ok(Algorithm::Alg2),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Alg1 => "1",
            Algorithm::Alg2 => "2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexRule {
    /// Lexicographic order, cut at the first vertex found outside ε.
    First,
    /// Scalarize every vertex, cut the farthest one.
    Farthest,
}

impl FromStr for VertexRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(VertexRule::First),
            "farthest" => Ok(VertexRule::Farthest),
            other => Err(Error::InvalidConfig(format!("unknown vertex rule {other:?}"))),
        }
    }
}

/// When the minimizer `x^v` of a vertex joins the solution set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizerUpdate {
    /// Only when the vertex is within ε.
    WithinEpsilon,
    /// After every norm-minimizing solve.
    EveryScalarization,
}

impl FromStr for MinimizerUpdate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "within-epsilon" | "within_epsilon" => Ok(MinimizerUpdate::WithinEpsilon),
            "every" | "every-scalarization" | "every_scalarization" => Ok(MinimizerUpdate::EveryScalarization),
            other => Err(Error::InvalidConfig(format!("unknown minimizer update {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub norm: Norm,
    pub algorithm: Algorithm,
    pub vertex_rule: VertexRule,
    pub minimizer_update: MinimizerUpdate,
    /// `None` means `0.1·max(1, δ^H)`.
    pub alpha_margin: Option<f64>,
    pub max_iterations: usize,
    pub geometry: GeometryTolerances,
    pub solver: SolverOptions,
}

impl RunConfig {
    pub fn new(epsilon: f64, norm: Norm, algorithm: Algorithm) -> Self {
        Self {
            epsilon,
            norm,
            algorithm,
            vertex_rule: VertexRule::First,
            minimizer_update: MinimizerUpdate::EveryScalarization,
            alpha_margin: None,
            max_iterations: 10_000,
            geometry: GeometryTolerances::default(),
            solver: SolverOptions::default(),
        }
    }

    pub fn with_vertex_rule(mut self, rule: VertexRule) -> Self {
        self.vertex_rule = rule;
        self
    }

    pub fn with_minimizer_update(mut self, update: MinimizerUpdate) -> Self {
        self.minimizer_update = update;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 10.0 * self.solver.tol) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must exceed 10 x solver tolerance ({}), got {}",
                self.solver.tol, self.epsilon
            )));
        }
        if let Some(m) = self.alpha_margin {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidConfig(format!("alpha margin must be positive, got {m}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minimizer {
    pub x: Vec<f64>,
    pub image: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSumRecord {
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub image: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutRecord {
    pub vertex: Vec<f64>,
    pub halfspace: Halfspace,
    pub distance: f64,
    pub w_v: Vec<f64>,
    pub x_v: Vec<f64>,
    pub image: Vec<f64>,
}

/// `S = {y | w̄ᵀy ≤ β + α}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabInfo {
    pub w_bar: Vec<f64>,
    pub beta: f64,
    pub alpha: f64,
    pub delta_h0: f64,
    pub margin: f64,
}

impl SlabInfo {
    pub fn bound(&self) -> f64 {
        self.beta + self.alpha
    }

    /// The slab as a `≥` halfspace.
    pub fn halfspace(&self) -> Result<Halfspace> {
        Halfspace::new(scale(&self.w_bar, -1.0), -self.bound())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub opt_count: usize,
    pub en_count: usize,
    pub iterations: usize,
    /// Largest vertex distance of each fully scalarized enumeration.
    pub round_bounds: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub t_opt: f64,
    pub t_en: f64,
    pub t_total: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Certified,
    Uncertified,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub problem: String,
    pub config: RunConfig,
    pub status: RunStatus,
    pub error: Option<String>,
    pub solution_set: Vec<Minimizer>,
    pub outer: Polyhedron,
    pub inner: VRep,
    pub stats: RunStats,
    pub timings: Timings,
    pub certified_bound: f64,
    pub final_vertices: Vec<ScalarizationResult>,
    pub cuts: Vec<CutRecord>,
    pub weighted_sums: Vec<WeightedSumRecord>,
    pub scalarizations: Vec<ScalarizationResult>,
    pub slab: Option<SlabInfo>,
}

impl SolveReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The polyhedron whose vertices were scalarized last: the outer set,
    /// clipped by the slab when there is one.
    pub fn enumerated(&self) -> Result<Polyhedron> {
        match &self.slab {
            None => Ok(self.outer.clone()),
            Some(s) => Ok(self.outer.add_halfspace(s.halfspace()?)?.polyhedron),
        }
    }
}

/// A run that stopped with an error, with everything computed up to then.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<SolveReport>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run failed: {}", self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Hooks into a running algorithm, mainly for tests.
pub trait RunObserver {
    fn on_cut(&mut self, _before: &Polyhedron, _halfspace: &Halfspace, _after: &Polyhedron) {}
    fn on_enumeration(&mut self, _polyhedron: &Polyhedron) {}
}

struct NoObserver;

impl RunObserver for NoObserver {}

/// Scalarized vertices, looked up by ℓ∞ proximity.
#[derive(Default)]
struct VertexCache {
    // Sorted by first coordinate.
    entries: Vec<(Vec<f64>, usize, bool)>,
    tol: f64,
}

impl VertexCache {
    fn find(&self, v: &[f64]) -> Option<usize> {
        let lo = self.entries.partition_point(|(k, _, _)| k[0] < v[0] - self.tol);
        self.entries[lo..]
            .iter()
            .take_while(|(k, _, _)| k[0] <= v[0] + self.tol)
            .position(|(k, _, _)| linf_dist(k, v) <= self.tol)
            .map(|i| lo + i)
    }

    fn get(&self, v: &[f64]) -> Option<(usize, bool)> {
        self.find(v).map(|i| (self.entries[i].1, self.entries[i].2))
    }

    fn insert(&mut self, v: Vec<f64>, index: usize) {
        let at = self.entries.partition_point(|(k, _, _)| k[0] < v[0]);
        self.entries.insert(at, (v, index, false));
    }

    fn mark_cut(&mut self, v: &[f64]) {
        if let Some(i) = self.find(v) {
            self.entries[i].2 = true;
        }
    }
}

fn lex_sorted(mut vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    vs.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    vs
}

struct Run<'a> {
    problem: &'a ProblemSpec,
    config: RunConfig,
    scal: Scalarizer<'a>,
    observer: &'a mut dyn RunObserver,
    w_bar: Vec<f64>,
    minimizers: Vec<Minimizer>,
    cache: VertexCache,
    scalarizations: Vec<ScalarizationResult>,
    weighted_sums: Vec<WeightedSumRecord>,
    cuts: Vec<CutRecord>,
    stats: RunStats,
    t_opt: Duration,
    t_en: Duration,
    started: Instant,
    outer: Option<Polyhedron>,
    work: Option<Polyhedron>,
    slab: Option<SlabInfo>,
    final_vertices: Vec<ScalarizationResult>,
    certified_bound: f64,
}

impl<'a> Run<'a> {
    fn add_minimizer(&mut self, x: Vec<f64>, image: Vec<f64>) {
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if self.minimizers.iter().any(|m| linf_dist(&m.x, &x) <= 1e-6 * scale) {
            return;
        }
        self.minimizers.push(Minimizer { x, image });
    }

    fn weighted_sum(&mut self, w: &[f64]) -> Result<WeightedSumRecord> {
        let t = Instant::now();
        let r = self.scal.weighted_sum(w);
        self.t_opt += t.elapsed();
        self.stats.opt_count += 1;
        let r = r?;
        let rec = WeightedSumRecord {
            w: w.to_vec(),
            x: r.x,
            image: r.image,
            value: r.value,
        };
        self.weighted_sums.push(rec.clone());
        Ok(rec)
    }

    fn remember(&mut self, r: ScalarizationResult) {
        self.cache.insert(r.v.clone(), self.scalarizations.len());
        self.scalarizations.push(r);
    }

    fn solve_vertex(&mut self, v: &[f64]) -> Result<ScalarizationResult> {
        let t = Instant::now();
        let r = self.scal.norm_min(v, self.config.norm);
        self.t_opt += t.elapsed();
        self.stats.opt_count += 1;
        let r = r?;
        self.remember(r.clone());
        Ok(r)
    }

    fn solve_batch(&mut self, vs: &[Vec<f64>]) -> Result<Vec<ScalarizationResult>> {
        let t = Instant::now();
        let scal = &self.scal;
        let norm = self.config.norm;
        let results: Vec<Result<ScalarizationResult>> = vs.par_iter().map(|v| scal.norm_min(v, norm)).collect();
        self.t_opt += t.elapsed();
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            self.stats.opt_count += 1;
            let r = r?;
            self.remember(r.clone());
            out.push(r);
        }
        Ok(out)
    }

    /// Minimizer of `w̄ᵀΓ` among points dominating `v`; used when `v` is
    /// interior so `x^v` itself carries no minimality.
    fn dominating_minimizer(&mut self, r: &ScalarizationResult) -> Result<Minimizer> {
        let n = self.problem.n();
        let f = self.problem.weighted_objective(&self.w_bar);
        let mut cost = vec![0.0; n + 1];
        cost[n] = 1.0;
        let b = self.problem.bounds();
        let mut program = ConvexProgram::new(cost)
            .with_quadratic_constraints(self.problem.constraints().iter().map(|g| g.embed(n + 1)))
            .with_quadratic_constraints([f.embed(n + 1).with_linear_terms(n, &[-1.0])])
            .with_bounds(b.lo.clone(), b.hi.clone());
        for w in self.problem.cone().dual_generators() {
            program = program.with_quadratic_constraints([self
                .problem
                .weighted_objective(w)
                .embed(n + 1)
                .shifted(-dot(w, &r.v))]);
        }
        let mut start = r.x_v.clone();
        start.push(f.eval(&r.x_v) + 1.0);
        let t = Instant::now();
        let sol = convex_solver::solve(&program.with_start(start), &self.config.solver);
        self.t_opt += t.elapsed();
        self.stats.opt_count += 1;
        let x = sol?.primal[..n].to_vec();
        let image = self.problem.evaluate(&x);
        Ok(Minimizer { x, image })
    }

    fn record(&mut self, r: &ScalarizationResult) -> Result<()> {
        let wanted = match self.config.minimizer_update {
            MinimizerUpdate::EveryScalarization => true,
            MinimizerUpdate::WithinEpsilon => r.distance <= self.config.epsilon,
        };
        if !wanted {
            return Ok(());
        }
        if r.distance == 0.0 && r.w_v.iter().all(|&w| w == 0.0) {
            let m = match self.dominating_minimizer(r) {
                Ok(m) => m,
                // `v` on the boundary: nothing strictly dominates it.
                Err(Error::Infeasible(_)) => Minimizer {
                    x: r.x_v.clone(),
                    image: r.image.clone(),
                },
                Err(e) => return Err(e),
            };
            self.add_minimizer(m.x, m.image);
        } else {
            self.add_minimizer(r.x_v.clone(), r.image.clone());
        }
        Ok(())
    }

    fn apply(&mut self, poly: &Polyhedron, h: &Halfspace) -> Result<Polyhedron> {
        let t = Instant::now();
        let cut = poly.add_halfspace(h.clone());
        self.t_en += t.elapsed();
        let cut = cut?;
        self.observer.on_cut(poly, h, &cut.polyhedron);
        Ok(cut.polyhedron)
    }

    fn cut(&mut self, r: &ScalarizationResult) -> Result<()> {
        let h = supporting_halfspace(r)?;
        if h.slack(&r.v) >= 0.0 {
            return Err(Error::Numerical(format!(
                "supporting halfspace does not separate vertex {:?}",
                r.v
            )));
        }
        let outer = self.outer.take().expect("outer set present");
        let new_outer = self.apply(&outer, &h);
        self.outer = Some(outer);
        let new_outer = new_outer?;
        if let Some(work) = self.work.take() {
            let new_work = self.apply(&work, &h);
            self.work = Some(work);
            self.work = Some(new_work?);
        }
        self.outer = Some(new_outer);
        self.cache.mark_cut(&r.v);
        self.cuts.push(CutRecord {
            vertex: r.v.clone(),
            halfspace: h,
            distance: r.distance,
            w_v: r.w_v.clone(),
            x_v: r.x_v.clone(),
            image: r.image.clone(),
        });
        Ok(())
    }

    fn enumerate(&mut self) -> Vec<Vec<f64>> {
        self.stats.en_count += 1;
        let poly = self.work.as_ref().or(self.outer.as_ref()).expect("outer set present");
        self.observer.on_enumeration(poly);
        lex_sorted(poly.vertices().to_vec())
    }

    fn initialize(&mut self) -> Result<()> {
        let dual = self.problem.cone().dual_generators().to_vec();
        let mut halfspaces = Vec::with_capacity(dual.len());
        for w in &dual {
            let rec = self.weighted_sum(w)?;
            self.add_minimizer(rec.x.clone(), rec.image.clone());
            halfspaces.push(Halfspace::new(w.clone(), dot(w, &rec.image))?);
        }
        let t = Instant::now();
        let outer = Polyhedron::from_halfspaces_with(halfspaces, self.config.geometry);
        self.t_en += t.elapsed();
        self.outer = Some(outer?);
        Ok(())
    }

    fn main_loop(&mut self) -> Result<()> {
        let eps = self.config.epsilon;
        loop {
            if self.stats.iterations >= self.config.max_iterations {
                return Err(Error::IterationLimit(self.config.max_iterations));
            }
            let vs = self.enumerate();
            self.stats.iterations += 1;
            let mut results = Vec::with_capacity(vs.len());
            match self.config.vertex_rule {
                VertexRule::First => {
                    let mut cut = None;
                    for v in &vs {
                        if let Some((i, was_cut)) = self.cache.get(v) {
                            if was_cut {
                                return Err(Error::Numerical(format!("vertex {v:?} survived its cut")));
                            }
                            results.push(self.scalarizations[i].clone());
                            continue;
                        }
                        let r = self.solve_vertex(v)?;
                        self.record(&r)?;
                        if r.distance > eps {
                            cut = Some(r);
                            break;
                        }
                        results.push(r);
                    }
                    if let Some(r) = cut {
                        self.cut(&r)?;
                        continue;
                    }
                    self.stats.round_bounds.push(results.iter().map(|r| r.distance).fold(0.0, f64::max));
                }
                VertexRule::Farthest => {
                    let unknown: Vec<Vec<f64>> = vs.iter().filter(|v| self.cache.get(v).is_none()).cloned().collect();
                    for r in self.solve_batch(&unknown)? {
                        self.record(&r)?;
                    }
                    let mut far: Option<(usize, bool)> = None;
                    for v in &vs {
                        let (i, was_cut) = self.cache.get(v).expect("every vertex scalarized");
                        let r = self.scalarizations[i].clone();
                        if far.is_none_or(|(j, _)| r.distance > self.scalarizations[j].distance) {
                            far = Some((i, was_cut));
                        }
                        results.push(r);
                    }
                    let (i, was_cut) = far.expect("polyhedron has a vertex");
                    let worst = self.scalarizations[i].clone();
                    self.stats.round_bounds.push(worst.distance);
                    if worst.distance > eps {
                        if was_cut {
                            return Err(Error::Numerical(format!("vertex {:?} survived its cut", worst.v)));
                        }
                        self.cut(&worst)?;
                        continue;
                    }
                }
            }
            self.certified_bound = results.iter().map(|r| r.distance).fold(0.0, f64::max);
            self.final_vertices = results;
            return Ok(());
        }
    }

    fn run_alg1(&mut self) -> Result<()> {
        self.initialize()?;
        self.main_loop()
    }

    fn run_alg2(&mut self) -> Result<()> {
        self.initialize()?;
        let v0 = self.enumerate();
        let mut delta_h0: f64 = 0.0;
        for v in &v0 {
            let r = self.solve_vertex(v)?;
            self.record(&r)?;
            delta_h0 = delta_h0.max(r.distance);
            if r.distance > self.config.epsilon {
                self.cut(&r)?;
            }
        }
        let beta = compute_beta(self.problem, &self.w_bar)?;
        let margin = self.config.alpha_margin.unwrap_or(0.1 * delta_h0.max(1.0));
        let above = v0
            .iter()
            .map(|v| (dot(&self.w_bar, v) - beta).max(0.0))
            .fold(0.0, f64::max);
        let slab = SlabInfo {
            w_bar: self.w_bar.clone(),
            beta,
            alpha: above + delta_h0 + margin,
            delta_h0,
            margin,
        };
        let h = slab.halfspace()?;
        self.slab = Some(slab);
        let outer = self.outer.clone().expect("outer set present");
        self.work = Some(self.apply(&outer, &h)?);
        self.main_loop()
    }

    fn report(self, error: Option<&Error>) -> SolveReport {
        let status = match error {
            Some(_) => RunStatus::Failed,
            None if self.certified_bound <= self.config.epsilon => RunStatus::Certified,
            None => RunStatus::Uncertified,
        };
        let outer = self.outer.unwrap_or_else(|| empty_polyhedron(self.problem.q()));
        let mut inner_points: Vec<Vec<f64>> = Vec::new();
        for m in &self.minimizers {
            if !inner_points.iter().any(|p| linf_dist(p, &m.image) <= self.config.geometry.vertex) {
                inner_points.push(m.image.clone());
            }
        }
        SolveReport {
            problem: self.problem.name().to_string(),
            status,
            error: error.map(|e| e.to_string()),
            solution_set: self.minimizers,
            outer,
            inner: VRep {
                vertices: inner_points,
                rays: self.problem.cone().primal_generators().to_vec(),
            },
            stats: self.stats,
            timings: Timings {
                t_opt: self.t_opt.as_secs_f64(),
                t_en: self.t_en.as_secs_f64(),
                t_total: self.started.elapsed().as_secs_f64(),
            },
            certified_bound: if error.is_some() { f64::INFINITY } else { self.certified_bound },
            final_vertices: self.final_vertices,
            cuts: self.cuts,
            weighted_sums: self.weighted_sums,
            scalarizations: self.scalarizations,
            slab: self.slab,
            config: self.config,
        }
    }
}

fn empty_polyhedron(q: usize) -> Polyhedron {
    // Only reachable when initialization itself failed: report the cone
    // apex at the origin as a placeholder.
    let hs = (0..q)
        .map(|i| {
            let mut e = vec![0.0; q];
            e[i] = 1.0;
            Halfspace::new(e, 0.0).expect("unit normal")
        })
        .collect();
    Polyhedron::from_halfspaces(hs).expect("orthant is valid")
}

/// Upper bound on `sup_{x∈X} w̄ᵀΓ(x)`: the largest value at a box corner.
pub fn compute_beta(problem: &ProblemSpec, w_bar: &[f64]) -> Result<f64> {
    problem.box_corner_max(w_bar)
}

/// Initial weighted-sum solves and the polyhedron they define.
#[derive(Clone, Debug)]
pub struct Initialization {
    pub weighted_sums: Vec<WeightedSumRecord>,
    pub outer: Polyhedron,
    pub vertices: Vec<Vec<f64>>,
}

pub fn initialize(problem: &ProblemSpec, config: &RunConfig) -> Result<Initialization> {
    let scal = Scalarizer::with_options(problem, config.solver)?;
    let mut weighted_sums = Vec::new();
    let mut hs = Vec::new();
    for w in problem.cone().dual_generators() {
        let r = scal.weighted_sum(w)?;
        hs.push(Halfspace::new(w.clone(), dot(w, &r.image))?);
        weighted_sums.push(WeightedSumRecord {
            w: w.clone(),
            x: r.x,
            image: r.image,
            value: r.value,
        });
    }
    let outer = Polyhedron::from_halfspaces_with(hs, config.geometry)?;
    let vertices = lex_sorted(outer.vertices().to_vec());
    Ok(Initialization {
        weighted_sums,
        outer,
        vertices,
    })
}

pub fn run(problem: &ProblemSpec, config: &RunConfig) -> Result<SolveReport, RunFailure> {
    run_with_observer(problem, config, &mut NoObserver)
}

pub fn run_algorithm1(problem: &ProblemSpec, config: &RunConfig) -> Result<SolveReport, RunFailure> {
    let mut c = config.clone();
    c.algorithm = Algorithm::Alg1;
    run(problem, &c)
}

pub fn run_algorithm2(problem: &ProblemSpec, config: &RunConfig) -> Result<SolveReport, RunFailure> {
    let mut c = config.clone();
    c.algorithm = Algorithm::Alg2;
    run(problem, &c)
}

pub fn run_with_observer(
    problem: &ProblemSpec,
    config: &RunConfig,
    observer: &mut dyn RunObserver,
) -> Result<SolveReport, RunFailure> {
    let started = Instant::now();
    let fail = |error: Error| RunFailure {
        partial: Box::new(SolveReport {
            problem: problem.name().to_string(),
            config: config.clone(),
            status: RunStatus::Failed,
            error: Some(error.to_string()),
            solution_set: Vec::new(),
            outer: empty_polyhedron(problem.q()),
            inner: VRep::default(),
            stats: RunStats::default(),
            timings: Timings::default(),
            certified_bound: f64::INFINITY,
            final_vertices: Vec::new(),
            cuts: Vec::new(),
            weighted_sums: Vec::new(),
            scalarizations: Vec::new(),
            slab: None,
        }),
        error,
    };
    if let Err(e) = config.validate() {
        return Err(fail(e));
    }
    let scal = match Scalarizer::with_options(problem, config.solver) {
        Ok(s) => s,
        Err(e) => return Err(fail(e)),
    };
    let mut state = Run {
        problem,
        config: config.clone(),
        scal,
        observer,
        w_bar: problem.cone().reference_direction(config.norm),
        minimizers: Vec::new(),
        cache: VertexCache {
            entries: Vec::new(),
            tol: config.geometry.vertex,
        },
        scalarizations: Vec::new(),
        weighted_sums: Vec::new(),
        cuts: Vec::new(),
        stats: RunStats::default(),
        t_opt: Duration::ZERO,
        t_en: Duration::ZERO,
        started,
        outer: None,
        work: None,
        slab: None,
        final_vertices: Vec::new(),
        certified_bound: f64::INFINITY,
    };
    let outcome = match config.algorithm {
        Algorithm::Alg1 => state.run_alg1(),
        Algorithm::Alg2 => state.run_alg2(),
    };
    match outcome {
        Ok(()) => Ok(state.report(None)),
        Err(error) => {
            let partial = state.report(Some(&error));
            Err(RunFailure {
                error,
                partial: Box::new(partial),
            })
        }
    }
}

/// Distance from `v` to `conv(inner.vertices) + cone(inner.rays)` in `norm`,
/// by column generation over the vertices.
pub fn distance_to_inner(v: &[f64], inner: &VRep, norm: Norm) -> Result<f64> {
    let q = v.len();
    if inner.vertices.is_empty() {
        return Err(Error::InvalidProblem("inner approximation has no points".into()));
    }
    let gap = |g: &Vec<f64>| norm.eval(&v.iter().zip(g).map(|(a, b)| a - b).collect::<Vec<_>>());
    let mut order: Vec<usize> = (0..inner.vertices.len()).collect();
    order.sort_by(|&a, &b| gap(&inner.vertices[a]).total_cmp(&gap(&inner.vertices[b])));
    let mut active: Vec<usize> = order.iter().copied().take(2 * q + 2).collect();
    loop {
        let pts: Vec<&Vec<f64>> = active.iter().map(|&i| &inner.vertices[i]).collect();
        let (d, u) = restricted_distance(v, &pts, &inner.rays, norm)?;
        if d <= DISTANCE_TOL {
            return Ok(0.0);
        }
        // Weak duality: min over all points of uᵀ(v − g) bounds the distance below.
        let tol = 1e-9 * (1.0 + d);
        let mut violators: Vec<(f64, usize)> = (0..inner.vertices.len())
            .filter(|i| !active.contains(i))
            .map(|i| {
                let g = &inner.vertices[i];
                (dot(&u, v) - dot(&u, g), i)
            })
            .filter(|(val, _)| *val < d - tol)
            .collect();
        if violators.is_empty() {
            return Ok(d);
        }
        violators.sort_by(|a, b| a.0.total_cmp(&b.0));
        active.extend(violators.iter().take(2 * q + 2).map(|(_, i)| *i));
    }
}

/// Distance to the hull of `pts` plus the cone of `rays`, with a dual vector.
fn restricted_distance(v: &[f64], pts: &[&Vec<f64>], rays: &[Vec<f64>], norm: Norm) -> Result<(f64, Vec<f64>)> {
    let q = v.len();
    let k = pts.len();
    let r = rays.len();
    // Variables: μ_1..μ_{k−1} (μ_k eliminated), ν (r), then the norm epigraph.
    let nm = k - 1;
    let aux = if norm == Norm::L1 { q } else { 1 };
    let m = nm + r + aux;
    // residual(u) = v − g_k − Σ μ_i (g_i − g_k) − Σ ν_j c_j = A u + a0
    let mut a = DMatrix::zeros(q, m);
    for i in 0..nm {
        for t in 0..q {
            a[(t, i)] = pts[k - 1][t] - pts[i][t];
        }
    }
    for (j, c) in rays.iter().enumerate() {
        for t in 0..q {
            a[(t, nm + j)] = -c[t];
        }
    }
    let a0 = DVector::from_iterator(q, (0..q).map(|t| v[t] - pts[k - 1][t]));

    let mut cost = vec![0.0; m];
    for c in &mut cost[nm + r..] {
        *c = 1.0;
    }
    let mut lo = vec![0.0; nm + r];
    lo.extend(std::iter::repeat_n(f64::NEG_INFINITY, aux));
    let hi = vec![f64::INFINITY; m];
    let mut start = vec![1.0 / k as f64; nm];
    start.extend(std::iter::repeat_n(1.0, r));
    let probe = {
        let mut u = DVector::from_vec(start.clone());
        u = u.insert_rows(nm + r, aux, 0.0);
        &a * u + &a0
    };
    let mut program = ConvexProgram::new(cost).with_bounds(lo, hi);
    if nm > 0 {
        let mut b = vec![0.0; m];
        for bi in &mut b[..nm] {
            *bi = 1.0;
        }
        program = program.with_quadratic_constraints([QuadraticFunction::linear(b, -1.0)]);
    }
    let row = |t: usize, sign: f64, col: usize| {
        let mut b: Vec<f64> = (0..m).map(|c| sign * a[(t, c)]).collect();
        b[col] -= 1.0;
        QuadraticFunction::linear(b, sign * a0[t])
    };
    match norm {
        Norm::L2 => {
            let mut c = DVector::zeros(m);
            c[nm + r] = 1.0;
            program = program.with_constraint(Constraint::SecondOrderCone(SocConstraint {
                a: a.clone(),
                a0: a0.clone(),
                c,
                d: 0.0,
            }));
            start.push(norm2(probe.as_slice()) + 1.0);
        }
        Norm::L1 => {
            program = program.with_quadratic_constraints((0..q).flat_map(|t| [row(t, 1.0, nm + r + t), row(t, -1.0, nm + r + t)]));
            start.extend(probe.iter().map(|p| p.abs() + 1.0));
        }
        Norm::LInf => {
            program = program.with_quadratic_constraints((0..q).flat_map(|t| [row(t, 1.0, nm + r), row(t, -1.0, nm + r)]));
            start.push(Norm::LInf.eval(probe.as_slice()) + 1.0);
        }
    }
    let sol = convex_solver::solve(&program.with_start(start), &SolverOptions::default())?;
    let u = DVector::from_column_slice(&sol.primal);
    let res: Vec<f64> = (&a * &u + &a0).iter().copied().collect();
    let d = norm.eval(&res);
    let first = usize::from(nm > 0);
    let dual = match norm {
        Norm::L2 => {
            let n2 = norm2(&res);
            if n2 > 0.0 {
                scale(&res, 1.0 / n2)
            } else {
                vec![0.0; q]
            }
        }
        Norm::L1 | Norm::LInf => (0..q)
            .map(|t| sol.multipliers[first + 2 * t] - sol.multipliers[first + 2 * t + 1])
            .collect(),
    };
    Ok((d, dual))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub outer_vs_truth: f64,
    pub outer_vs_inner: f64,
}

/// Largest distances from the final vertices to the upper image and to the
/// inner approximation.
pub fn hausdorff_report(report: &SolveReport) -> Result<HausdorffReport> {
    let norm = report.config.norm;
    let outer_vs_truth = report.final_vertices.iter().map(|r| r.distance).fold(0.0, f64::max);
    let mut outer_vs_inner: f64 = 0.0;
    for r in &report.final_vertices {
        outer_vs_inner = outer_vs_inner.max(distance_to_inner(&r.v, &report.inner, norm)?);
    }
    Ok(HausdorffReport {
        outer_vs_truth,
        outer_vs_inner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;
    use crate::vecops::angle;

    const R2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn initialization_of_disc_example() {
        let p = catalog("ex8.1-q2").unwrap();
        let init = initialize(&p, &RunConfig::new(0.5, Norm::L2, Algorithm::Alg1)).unwrap();
        assert_eq!(init.vertices.len(), 1);
        assert!(norm2(&init.vertices[0]) < 1e-7);
        let xs: Vec<_> = init.weighted_sums.iter().map(|w| w.x.clone()).collect();
        assert!(linf_dist(&xs[0], &[0.0, 1.0]) < 1e-4, "{xs:?}");
        assert!(linf_dist(&xs[1], &[1.0, 0.0]) < 1e-4, "{xs:?}");
    }

    #[test]
    fn initialization_with_c1() {
        // The cuts use generators of the dual cone, which for C1 is C2.
        let p = catalog("ex8.1-q2")
            .unwrap()
            .with_cone(crate::cones::OrderingCone::builtin("C1", 2).unwrap())
            .unwrap();
        let init = initialize(&p, &RunConfig::new(0.5, Norm::L2, Algorithm::Alg1)).unwrap();
        assert_eq!(init.outer.halfspaces().len(), 2);
        assert_eq!(init.vertices.len(), 1);
        let s = 1.0 / 5f64.sqrt();
        let normals: Vec<_> = init.outer.halfspaces().iter().map(|h| h.normal().to_vec()).collect();
        assert!(normals.iter().any(|n| linf_dist(n, &[2.0 * s, -s]) < 1e-12));
        assert!(normals.iter().any(|n| linf_dist(n, &[-s, 2.0 * s]) < 1e-12));
    }

    #[test]
    fn coarse_run_stops_immediately() {
        let p = catalog("ex8.1-q2").unwrap();
        let r = run(&p, &RunConfig::new(0.5, Norm::L2, Algorithm::Alg1)).unwrap();
        assert_eq!(r.status, RunStatus::Certified);
        assert_eq!(r.solution_set.len(), 3);
        assert_eq!(r.stats.opt_count, 3);
        assert_eq!(r.stats.en_count, 1);
        assert!((r.certified_bound - (R2 - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn one_cut_run() {
        let p = catalog("ex8.1-q2").unwrap();
        let r = run(&p, &RunConfig::new(0.3, Norm::L2, Algorithm::Alg1)).unwrap();
        assert_eq!(r.cuts.len(), 1);
        assert!(angle(r.cuts[0].halfspace.normal(), &[1.0, 1.0]) < 1e-6);
        assert!((r.cuts[0].halfspace.offset() - (R2 - 1.0)).abs() < 1e-6);
        assert_eq!(r.solution_set.len(), 5);
        assert_eq!(r.stats.opt_count, 5);
        assert_eq!(r.stats.en_count, 2);
        assert!((r.certified_bound - 0.08239).abs() < 5e-4, "{}", r.certified_bound);

        let main_text = RunConfig::new(0.3, Norm::L2, Algorithm::Alg1).with_minimizer_update(MinimizerUpdate::WithinEpsilon);
        let r = run(&p, &main_text).unwrap();
        assert_eq!(r.solution_set.len(), 4);
    }

    #[test]
    fn slab_run_certifies() {
        let p = catalog("ex8.1-q2").unwrap();
        let r = run(&p, &RunConfig::new(0.5, Norm::L2, Algorithm::Alg2)).unwrap();
        assert_eq!(r.status, RunStatus::Certified);
        let slab = r.slab.as_ref().unwrap();
        assert!((slab.delta_h0 - (R2 - 1.0)).abs() < 1e-6);
        for s in &r.scalarizations {
            assert!(dot(&slab.w_bar, &s.v) <= slab.bound() + 1e-7);
        }
        // The slab is not part of the reported outer set.
        assert!(r.outer.halfspaces().iter().all(|h| dot(h.normal(), &slab.w_bar) > 0.0));
    }

    #[test]
    fn beta_examples() {
        let p = catalog("ex8.1-q3").unwrap();
        let w = p.cone().reference_direction(Norm::L2);
        assert!((compute_beta(&p, &w).unwrap() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn inner_distances() {
        let e = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let single = VRep {
            vertices: vec![vec![1.0, 1.0]],
            rays: e.clone(),
        };
        assert!((distance_to_inner(&[0.0, 0.0], &single, Norm::L2).unwrap() - R2).abs() < 1e-7);
        assert!((distance_to_inner(&[2.0, 0.0], &single, Norm::L2).unwrap() - 1.0).abs() < 1e-7);
        assert_eq!(distance_to_inner(&[3.0, 3.0], &single, Norm::L2).unwrap(), 0.0);
        let seg = VRep {
            vertices: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            rays: e,
        };
        assert!((distance_to_inner(&[0.0, 0.0], &seg, Norm::L2).unwrap() - 1.0 / R2).abs() < 1e-7);
        assert!((distance_to_inner(&[0.0, 0.0], &seg, Norm::LInf).unwrap() - 0.5).abs() < 1e-7);
        assert!((distance_to_inner(&[0.0, 0.0], &seg, Norm::L1).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn column_generation_matches_full_set() {
        // Points on a circle arc: the nearest point is found even when it
        // starts outside the active set.
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let t = std::f64::consts::FRAC_PI_2 * i as f64 / 39.0;
                vec![1.0 - t.cos(), 1.0 - t.sin()]
            })
            .collect();
        let inner = VRep {
            vertices: pts,
            rays: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let d = distance_to_inner(&[0.0, 0.0], &inner, Norm::L2).unwrap();
        // Chord midpoint distance for 39 equal arcs.
        let half = std::f64::consts::FRAC_PI_4 / 39.0;
        let expected = R2 - half.cos();
        assert!((d - expected).abs() < 1e-6, "{d} vs {expected}");
    }

    #[test]
    fn hausdorff_of_coarse_run() {
        let p = catalog("ex8.1-q2").unwrap();
        let r = run(&p, &RunConfig::new(0.3, Norm::L2, Algorithm::Alg1)).unwrap();
        let h = hausdorff_report(&r).unwrap();
        assert!((h.outer_vs_truth - r.certified_bound).abs() < 1e-12);
        assert!(h.outer_vs_truth <= h.outer_vs_inner + 1e-7);
        assert!(h.outer_vs_inner <= 0.3);
    }

    #[test]
    fn invalid_config() {
        let p = catalog("ex8.1-q2").unwrap();
        let err = run(&p, &RunConfig::new(-1.0, Norm::L2, Algorithm::Alg1)).unwrap_err();
        assert!(matches!(err.error, Error::InvalidConfig(_)));
        let mut c = RunConfig::new(1e-3, Norm::L2, Algorithm::Alg1);
        c.max_iterations = 2;
        let err = run(&p, &c).unwrap_err();
        assert!(matches!(err.error, Error::IterationLimit(2)));
        assert_eq!(err.partial.status, RunStatus::Failed);
        assert!(!err.partial.cuts.is_empty());
    }
}
