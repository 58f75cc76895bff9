//! Independent checks on a finished run: samples of the upper image, a
//! projected-gradient distance oracle and run certification.
//!
//! Nothing here calls into the interior-point solver.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approximation::SolveReport;
use crate::error::{Error, Result};
use crate::norm::Norm;
use crate::problem::{ProblemSpec, QuadraticFunction};

pub const DEFAULT_RESTARTS: usize = 32;
pub const CONTAINMENT_TOL: f64 = 1e-6;
pub const DOMINANCE_TOL: f64 = 1e-6;

const MIN_ATTEMPTS: usize = 10_000;
const MIN_ACCEPTANCE: f64 = 1e-4;

/// Feasible `x` and cone coordinates `u` with `point = Γ(x) + Σ u_j g_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleCloud {
    pub points: Vec<Vec<f64>>,
    pub witnesses: Vec<Witness>,
    pub seed: u64,
    pub count: usize,
}

/// Rejection-samples `count` points of the upper image.
pub fn sample_upper_image(problem: &ProblemSpec, count: usize, seed: u64) -> Result<SampleCloud> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = problem.bounds();
    let gens = problem.cone().primal_generators();
    let mut points = Vec::with_capacity(count);
    let mut witnesses = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while points.len() < count {
        attempts += 1;
        let x: Vec<f64> = bounds.lo.iter().zip(&bounds.hi).map(|(&l, &h)| rng.gen_range(l..=h)).collect();
        if problem.is_feasible(&x, 0.0) {
            let u: Vec<f64> = (0..gens.len()).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let mut y = problem.evaluate(&x);
            for (g, uj) in gens.iter().zip(&u) {
                for (yi, gi) in y.iter_mut().zip(g) {
                    *yi += uj * gi;
                }
            }
            points.push(y);
            witnesses.push(Witness { x, u });
        } else if attempts >= MIN_ATTEMPTS && (points.len() as f64) < MIN_ACCEPTANCE * attempts as f64 {
            return Err(Error::SamplingStarved { accepted: points.len(), attempts });
        }
    }
    Ok(SampleCloud { points, witnesses, seed, count })
}

/// Convex quadratic sublevel set with `Q = V diag(d) Vᵀ` cached.
struct Sublevel<'a> {
    g: &'a QuadraticFunction,
    vecs: DMatrix<f64>,
    vals: DVector<f64>,
    /// `Vᵀb`.
    b_rot: DVector<f64>,
}

impl<'a> Sublevel<'a> {
    fn new(g: &'a QuadraticFunction) -> Self {
        let eig = g.hessian().clone().symmetric_eigen();
        let b_rot = eig.eigenvectors.transpose() * g.linear_part();
        Sublevel { g, vals: eig.eigenvalues.map(|d| d.max(0.0)), vecs: eig.eigenvectors, b_rot }
    }

    /// Euclidean projection; `x(λ) = (I + λQ)⁻¹(y − λb)` with `g(x(λ))`
    /// decreasing in `λ`, located by bracketing and bisection.
    fn project(&self, y: &DVector<f64>) -> DVector<f64> {
        let g = self.g;
        if g.eval(y.as_slice()) <= 0.0 {
            return y.clone();
        }
        let b = g.linear_part();
        if g.is_linear() {
            let bb = b.norm_squared();
            if bb == 0.0 {
                return y.clone();
            }
            return y - b * (g.eval(y.as_slice()) / bb);
        }
        let y_rot = self.vecs.transpose() * y;
        let at = |lambda: f64| -> DVector<f64> {
            let mut w = &y_rot - &self.b_rot * lambda;
            for (wi, d) in w.iter_mut().zip(self.vals.iter()) {
                *wi /= 1.0 + lambda * d;
            }
            &self.vecs * w
        };
        let mut hi = 1.0;
        let mut x_hi = at(hi);
        for _ in 0..80 {
            if g.eval(x_hi.as_slice()) <= 0.0 {
                break;
            }
            hi *= 2.0;
            x_hi = at(hi);
        }
        let mut lo = 0.0;
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            let x_mid = at(mid);
            if g.eval(x_mid.as_slice()) <= 0.0 {
                hi = mid;
                x_hi = x_mid;
            } else {
                lo = mid;
            }
        }
        x_hi
    }
}

/// Projection onto the feasible set by Dykstra's alternating scheme.
struct FeasibleSet<'a> {
    lo: &'a [f64],
    hi: &'a [f64],
    constraints: Vec<Sublevel<'a>>,
}

impl<'a> FeasibleSet<'a> {
    fn new(problem: &'a ProblemSpec) -> Self {
        let bounds = problem.bounds();
        FeasibleSet {
            lo: &bounds.lo,
            hi: &bounds.hi,
            constraints: problem.constraints().iter().map(Sublevel::new).collect(),
        }
    }

    fn project_box(&self, y: &mut DVector<f64>) {
        for i in 0..y.len() {
            y[i] = y[i].clamp(self.lo[i], self.hi[i]);
        }
    }

    fn project(&self, y: &DVector<f64>) -> DVector<f64> {
        let mut x = y.clone();
        self.project_box(&mut x);
        if self.constraints.is_empty() || self.constraints.iter().all(|c| c.g.eval(x.as_slice()) <= 0.0) {
            return x;
        }
        let mut x = y.clone();
        let mut corrections = vec![DVector::zeros(y.len()); self.constraints.len() + 1];
        for _ in 0..500 {
            let start = x.clone();
            for (k, corr) in corrections.iter_mut().enumerate() {
                let shifted = &x + &*corr;
                let p = if k == 0 {
                    let mut p = shifted.clone();
                    self.project_box(&mut p);
                    p
                } else {
                    self.constraints[k - 1].project(&shifted)
                };
                *corr = shifted - &p;
                x = p;
            }
            if (&x - start).amax() <= 1e-13 * (1.0 + x.amax()) {
                break;
            }
        }
        x
    }
}

/// Smooth surrogate of a norm; `eta = 0` for the exact squared ℓ2 case.
#[derive(Clone, Copy)]
enum Surrogate {
    HalfSquared,
    Huber(f64),
    LogSumExp(f64),
}

impl Surrogate {
    fn value_grad(self, r: &DVector<f64>) -> (f64, DVector<f64>) {
        match self {
            Surrogate::HalfSquared => (0.5 * r.norm_squared(), r.clone()),
            Surrogate::Huber(eta) => {
                let mut val = 0.0;
                let grad = r.map(|ri| {
                    if ri.abs() <= eta {
                        val += ri * ri / (2.0 * eta);
                        ri / eta
                    } else {
                        val += ri.abs() - eta / 2.0;
                        ri.signum()
                    }
                });
                (val, grad)
            }
            Surrogate::LogSumExp(eta) => {
                let top = r.amax();
                let mut sum = 0.0;
                let mut grad = DVector::zeros(r.len());
                for (i, &ri) in r.iter().enumerate() {
                    let a = ((ri - top) / eta).exp();
                    let b = ((-ri - top) / eta).exp();
                    sum += a + b;
                    grad[i] = a - b;
                }
                (top + eta * sum.ln(), grad / sum)
            }
        }
    }
}

struct Oracle<'a> {
    problem: &'a ProblemSpec,
    feasible: FeasibleSet<'a>,
    gens: DMatrix<f64>,
    v: DVector<f64>,
    n: usize,
}

impl<'a> Oracle<'a> {
    fn new(problem: &'a ProblemSpec, v: &[f64]) -> Self {
        let q = problem.q();
        let primal = problem.cone().primal_generators();
        let gens = DMatrix::from_fn(q, primal.len(), |i, j| primal[j][i]);
        Oracle {
            problem,
            feasible: FeasibleSet::new(problem),
            gens,
            v: DVector::from_column_slice(v),
            n: problem.n(),
        }
    }

    fn residual(&self, point: &DVector<f64>) -> DVector<f64> {
        let x = &point.as_slice()[..self.n];
        let u = point.rows(self.n, point.len() - self.n);
        DVector::from_vec(self.problem.evaluate(x)) + &self.gens * u - &self.v
    }

    fn value_grad(&self, point: &DVector<f64>, s: Surrogate) -> (f64, DVector<f64>) {
        let r = self.residual(point);
        let (val, gr) = s.value_grad(&r);
        let jac = self.problem.jacobian(&point.as_slice()[..self.n]);
        let gx = jac.transpose() * &gr;
        let gu = self.gens.transpose() * &gr;
        let mut grad = DVector::zeros(point.len());
        grad.rows_mut(0, self.n).copy_from(&gx);
        grad.rows_mut(self.n, gu.len()).copy_from(&gu);
        (val, grad)
    }

    fn project(&self, point: &DVector<f64>) -> DVector<f64> {
        let mut out = point.clone();
        let x = self.feasible.project(&point.rows(0, self.n).into_owned());
        out.rows_mut(0, self.n).copy_from(&x);
        for i in self.n..out.len() {
            out[i] = out[i].max(0.0);
        }
        out
    }

    /// Monotone accelerated projected gradient with backtracking.
    fn descend(&self, start: DVector<f64>, s: Surrogate, max_iter: usize) -> DVector<f64> {
        let mut x = start;
        let (mut fx, _) = self.value_grad(&x, s);
        let mut y = x.clone();
        let mut t: f64 = 1.0;
        let mut lip: f64 = 1.0;
        for _ in 0..max_iter {
            let (fy, gy) = self.value_grad(&y, s);
            lip = (lip * 0.7).max(1e-12);
            let (next, fnext) = loop {
                let cand = self.project(&(&y - &gy / lip));
                let step = &cand - &y;
                let (fc, _) = self.value_grad(&cand, s);
                if fc <= fy + gy.dot(&step) + 0.5 * lip * step.norm_squared() + 1e-15 * (1.0 + fy.abs())
                    || lip > 1e20
                {
                    break (cand, fc);
                }
                lip *= 2.0;
            };
            let moved = (&next - &x).amax();
            if fnext > fx {
                // Momentum overshot: restart from the last accepted iterate.
                if t == 1.0 {
                    break;
                }
                y = x.clone();
                t = 1.0;
                continue;
            }
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            y = &next + (&next - &x) * ((t - 1.0) / t_next);
            t = t_next;
            let gain = fx - fnext;
            x = next;
            fx = fnext;
            if moved <= 1e-13 * (1.0 + x.amax()) || gain <= 1e-16 * (1.0 + fx.abs()) && moved <= 1e-10 {
                break;
            }
        }
        x
    }

    fn solve_from(&self, start: DVector<f64>, norm: Norm) -> f64 {
        let scale = 1.0 + self.residual(&start).amax();
        let x = match norm {
            Norm::L2 => self.descend(start, Surrogate::HalfSquared, 20_000),
            Norm::L1 | Norm::LInf => {
                let mut x = start;
                let mut eta = 1e-1 * scale;
                while eta > 1e-8 * scale {
                    let s = match norm {
                        Norm::L1 => Surrogate::Huber(eta),
                        _ => Surrogate::LogSumExp(eta),
                    };
                    x = self.descend(x, s, 2_000);
                    eta *= 0.1;
                }
                x
            }
        };
        norm.eval(self.residual(&x).as_slice())
    }
}

/// `d(v, P)` by multi-start projected gradient over `(x, u)` with
/// `Γ(x) + Σ u_j g_j` parameterizing the upper image.
pub fn oracle_distance(problem: &ProblemSpec, v: &[f64], norm: Norm, restarts: usize) -> f64 {
    let oracle = Oracle::new(problem, v);
    let bounds = problem.bounds();
    let m = problem.n() + oracle.gens.ncols();
    let starts: Vec<DVector<f64>> = (0..restarts.max(1))
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + k as u64);
            let mut p = DVector::zeros(m);
            for i in 0..problem.n() {
                p[i] = if k == 0 {
                    0.5 * (bounds.lo[i] + bounds.hi[i])
                } else {
                    rng.gen_range(bounds.lo[i]..=bounds.hi[i])
                };
            }
            oracle.project(&p)
        })
        .collect();
    starts
        .into_par_iter()
        .map(|s| oracle.solve_from(s, norm))
        .reduce(|| f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A sampled point of P falls outside the outer approximation.
    OutsideOuter { point: Vec<f64>, slack: f64 },
    DistanceMismatch { vertex: Vec<f64>, solver: f64, oracle: f64 },
    /// `Γ(x_v) ≤_C y_v` fails.
    NotDominated { vertex: Vec<f64>, image: Vec<f64>, y_v: Vec<f64> },
    /// A supporting halfspace cuts off a sampled point of P.
    InvalidHalfspace { vertex: Vec<f64>, point: Vec<f64>, slack: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub pass: bool,
    pub violations: Vec<Violation>,
    /// Oracle value per final vertex, in report order.
    #[serde(skip)]
    pub oracle_distances: Vec<f64>,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn min_slack(normal: &[f64], offset: f64, cloud: &SampleCloud) -> Option<(Vec<f64>, f64)> {
    cloud
        .points
        .iter()
        .map(|y| (y, normal.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - offset))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(y, s)| (y.clone(), s))
}

/// Re-checks a finished run against the cloud and the oracle.
pub fn certify(report: &SolveReport, problem: &ProblemSpec, cloud: &SampleCloud) -> Certificate {
    let mut violations = Vec::new();
    for y in &cloud.points {
        let slack = report.outer.halfspaces().iter().map(|h| h.slack(y)).fold(f64::INFINITY, f64::min);
        if slack < -CONTAINMENT_TOL {
            violations.push(Violation::OutsideOuter { point: y.clone(), slack });
        }
    }

    let norm = report.config.norm;
    let oracle: Vec<f64> = report
        .final_vertices
        .par_iter()
        .map(|r| oracle_distance(problem, &r.v, norm, DEFAULT_RESTARTS))
        .collect();
    for (r, &d) in report.final_vertices.iter().zip(&oracle) {
        if (d - r.distance).abs() > 1e-3 * (1.0 + r.distance) {
            violations.push(Violation::DistanceMismatch { vertex: r.v.clone(), solver: r.distance, oracle: d });
        }
    }

    let cone = problem.cone();
    let scalarized = report.scalarizations.iter().chain(&report.final_vertices);
    for r in scalarized.clone() {
        let image = problem.evaluate(&r.x_v);
        if !cone.leq(&image, &r.y_v, DOMINANCE_TOL * (1.0 + r.y_v.iter().fold(0.0, |m: f64, a| m.max(a.abs())))) {
            violations.push(Violation::NotDominated { vertex: r.v.clone(), image, y_v: r.y_v.clone() });
        }
    }

    let mut normals: Vec<(&[f64], Vec<f64>, f64)> = Vec::new();
    for r in scalarized {
        if r.distance > 0.0 {
            let image = problem.evaluate(&r.x_v);
            let offset = r.w_v.iter().zip(&image).map(|(a, b)| a * b).sum();
            normals.push((&r.v, r.w_v.clone(), offset));
        }
    }
    for c in &report.cuts {
        normals.push((&c.vertex, c.halfspace.normal().to_vec(), c.halfspace.offset()));
    }
    for (vertex, normal, offset) in normals {
        let scale = 1.0 + normal.iter().fold(0.0, |m: f64, a| m.max(a.abs()));
        if let Some((point, slack)) = min_slack(&normal, offset, cloud) {
            if slack < -CONTAINMENT_TOL * scale {
                violations.push(Violation::InvalidHalfspace { vertex: vertex.to_vec(), point, slack });
            }
        }
    }

    Certificate { pass: violations.is_empty(), violations, oracle_distances: oracle }
}
