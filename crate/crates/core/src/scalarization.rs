//! Weighted-sum and norm-minimizing scalarizations.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::convex_solver::{self, Constraint, ConvexProgram, SocConstraint, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::Halfspace;
use crate::norm::Norm;
use crate::problem::{ProblemSpec, QuadraticFunction};
use crate::vecops::{add, dot, norm2, scale, sub};

/// Distances at or below this count as zero.
pub const DISTANCE_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSumResult {
    pub x: Vec<f64>,
    pub image: Vec<f64>,
    pub value: f64,
}

/// Solution of the norm-minimizing problem at `v` with its dual vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarizationResult {
    pub v: Vec<f64>,
    pub x_v: Vec<f64>,
    pub z_v: Vec<f64>,
    pub w_v: Vec<f64>,
    pub distance: f64,
    pub y_v: Vec<f64>,
    /// `Γ(x_v)`.
    pub image: Vec<f64>,
    pub norm: Norm,
}

/// Solves scalarizations of one problem, reusing its interior point.
#[derive(Clone, Debug)]
pub struct Scalarizer<'a> {
    problem: &'a ProblemSpec,
    x0: Vec<f64>,
    options: SolverOptions,
    cone_rows: Vec<QuadraticFunction>,
}

impl<'a> Scalarizer<'a> {
    pub fn new(problem: &'a ProblemSpec) -> Result<Self> {
        Self::with_options(problem, SolverOptions::default())
    }

    pub fn with_options(problem: &'a ProblemSpec, options: SolverOptions) -> Result<Self> {
        let x0 = problem.interior_point()?;
        let cone_rows = problem
            .cone()
            .dual_generators()
            .iter()
            .map(|w| problem.weighted_objective(w))
            .collect();
        Ok(Self {
            problem,
            x0,
            options,
            cone_rows,
        })
    }

    pub fn problem(&self) -> &ProblemSpec {
        self.problem
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.x0
    }

    fn feasible_region(&self, program: ConvexProgram) -> ConvexProgram {
        let m = program.num_vars();
        let b = self.problem.bounds();
        program
            .with_quadratic_constraints(self.problem.constraints().iter().map(|g| g.embed(m)))
            .with_bounds(b.lo.clone(), b.hi.clone())
    }

    /// Minimizes `wᵀΓ(x)` over the feasible region, as `min r` s.t. `wᵀΓ(x) ≤ r`.
    pub fn weighted_sum(&self, w: &[f64]) -> Result<WeightedSumResult> {
        let n = self.problem.n();
        if w.len() != self.problem.q() {
            return Err(Error::DimensionMismatch(format!("weight of length {}", w.len())));
        }
        let f = self.problem.weighted_objective(w);
        let mut cost = vec![0.0; n + 1];
        cost[n] = 1.0;
        let mut start = self.x0.clone();
        let f0 = f.eval(&self.x0);
        start.push(f0 + f0.abs().max(1.0));
        let program = self
            .feasible_region(ConvexProgram::new(cost))
            .with_quadratic_constraints([f.embed(n + 1).with_linear_terms(n, &[-1.0])])
            .with_start(start);
        let sol = convex_solver::solve(&program, &self.options)?;
        let x = sol.primal[..n].to_vec();
        let image = self.problem.evaluate(&x);
        Ok(WeightedSumResult {
            value: dot(w, &image),
            image,
            x,
        })
    }

    /// Minimizes `‖z‖` subject to `Γ(x) − z − v ≤_C 0` over the feasible region.
    pub fn norm_min(&self, v: &[f64], norm: Norm) -> Result<ScalarizationResult> {
        let n = self.problem.n();
        let q = self.problem.q();
        if v.len() != q {
            return Err(Error::DimensionMismatch(format!("point of length {}", v.len())));
        }
        let dual = self.problem.cone().dual_generators();
        let aux = match norm {
            Norm::L1 => q,
            Norm::L2 | Norm::LInf => 1,
        };
        let m = n + q + aux;
        let mut cost = vec![0.0; m];
        for c in &mut cost[n + q..] {
            *c = 1.0;
        }

        let image0 = self.problem.evaluate(&self.x0);
        let shift = self.problem.cone().interior_point();
        let shift = scale(&shift, 1.0 / norm2(&shift));
        let z0 = add(&sub(&image0, v), &shift);
        let mut start = self.x0.clone();
        start.extend_from_slice(&z0);
        match norm {
            Norm::L1 => start.extend(z0.iter().map(|z| 2.0 * z.abs() + 1.0)),
            Norm::L2 => start.push(2.0 * norm2(&z0) + 1.0),
            Norm::LInf => start.push(2.0 * Norm::LInf.eval(&z0) + 1.0),
        }

        let mut program = self.feasible_region(ConvexProgram::new(cost)).with_quadratic_constraints(
            self.cone_rows.iter().zip(dual).map(|(f, w)| {
                f.embed(m)
                    .with_linear_terms(n, &scale(w, -1.0))
                    .shifted(-dot(w, v))
            }),
        );
        let zi = |i: usize, sign: f64, ti: usize| {
            let mut b = vec![0.0; m];
            b[n + i] = sign;
            b[ti] = -1.0;
            QuadraticFunction::linear(b, 0.0)
        };
        match norm {
            Norm::L2 => {
                let mut a = DMatrix::zeros(q, m);
                for i in 0..q {
                    a[(i, n + i)] = 1.0;
                }
                let mut c = DVector::zeros(m);
                c[n + q] = 1.0;
                program = program.with_constraint(Constraint::SecondOrderCone(SocConstraint {
                    a,
                    a0: DVector::zeros(q),
                    c,
                    d: 0.0,
                }));
            }
            Norm::L1 => {
                program = program.with_quadratic_constraints(
                    (0..q).flat_map(|i| [zi(i, 1.0, n + q + i), zi(i, -1.0, n + q + i)]),
                );
            }
            Norm::LInf => {
                program = program
                    .with_quadratic_constraints((0..q).flat_map(|i| [zi(i, 1.0, n + q), zi(i, -1.0, n + q)]));
            }
        }
        let sol = convex_solver::solve(&program.with_start(start), &self.options)?;

        let x_v = sol.primal[..n].to_vec();
        let mut z_v = sol.primal[n..n + q].to_vec();
        let mut distance = norm.eval(&z_v);
        let mut w_v = vec![0.0; q];
        let skip = self.problem.constraints().len();
        for (lam, w) in sol.multipliers[skip..].iter().zip(dual) {
            for (wi, gi) in w_v.iter_mut().zip(w) {
                *wi += lam * gi;
            }
        }
        if distance <= DISTANCE_TOL {
            distance = 0.0;
            z_v = vec![0.0; q];
        } else if norm == Norm::L2 {
            w_v = scale(&z_v, 1.0 / norm2(&z_v));
        }
        if norm2(&w_v) <= DISTANCE_TOL {
            if distance > 0.0 {
                return Err(Error::DualDegenerate { distance });
            }
            w_v = vec![0.0; q];
        }
        let image = self.problem.evaluate(&x_v);
        Ok(ScalarizationResult {
            v: v.to_vec(),
            y_v: add(v, &z_v),
            x_v,
            z_v,
            w_v,
            distance,
            image,
            norm,
        })
    }
}

pub fn weighted_sum(problem: &ProblemSpec, w: &[f64]) -> Result<WeightedSumResult> {
    Scalarizer::new(problem)?.weighted_sum(w)
}

pub fn norm_min(problem: &ProblemSpec, v: &[f64], norm: Norm) -> Result<ScalarizationResult> {
    Scalarizer::new(problem)?.norm_min(v, norm)
}

/// `{y | w_vᵀy ≥ w_vᵀΓ(x_v)}`.
pub fn supporting_halfspace(result: &ScalarizationResult) -> Result<Halfspace> {
    if norm2(&result.w_v) <= DISTANCE_TOL {
        return Err(Error::DegenerateNormal);
    }
    Halfspace::new(result.w_v.clone(), dot(&result.w_v, &result.image)).map_err(|_| Error::DegenerateNormal)
}

/// Halfspace with normal `sgn(z_i)|z_i|^{p−1}` through `Γ(x_v)`.
pub fn lp_halfspace_from_z(result: &ScalarizationResult, p: f64) -> Result<Halfspace> {
    if !(1.0..f64::INFINITY).contains(&p) {
        return Err(Error::UnsupportedNorm(format!("p = {p}")));
    }
    let normal: Vec<f64> = result
        .z_v
        .iter()
        .map(|&z| if z == 0.0 { 0.0 } else { z.signum() * z.abs().powf(p - 1.0) })
        .collect();
    if normal.iter().all(|&c| c == 0.0) {
        return Err(Error::DegenerateNormal);
    }
    let offset = dot(&normal, &result.image);
    Halfspace::new(normal, offset).map_err(|_| Error::DegenerateNormal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::catalog;
    use crate::vecops::angle;

    const R2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn weighted_sum_on_disc() {
        let p = catalog("ex8.1-q2").unwrap();
        let s = Scalarizer::new(&p).unwrap();
        let r = s.weighted_sum(&[1.0, 0.0]).unwrap();
        assert!((r.x[0]).abs() < 1e-7 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
        assert!(r.value.abs() < 1e-7);
        let r2 = s.weighted_sum(&[3.0, 0.0]).unwrap();
        assert!((r2.value - 3.0 * r.value).abs() < 1e-7);
    }

    #[test]
    fn weighted_sum_on_the_three_ball() {
        let p = catalog("ex8.1-q3").unwrap();
        let r = weighted_sum(&p, &[1.0, 1.0, 0.1]).unwrap();
        for (a, b) in r.image.iter().zip([0.2947, 0.2947, 0.9295]) {
            assert!((a - b).abs() < 1e-3, "{:?}", r.image);
        }
        // w = (1,1,0.1) is tangent to the unit ball around e at e − w/‖w‖.
        let expected = 2.1 - (2.01f64).sqrt();
        assert!((r.value - expected).abs() < 1e-7);
    }

    #[test]
    fn norm_min_origin_all_norms() {
        let p = catalog("ex8.1-q2").unwrap();
        let s = Scalarizer::new(&p).unwrap();
        let r = s.norm_min(&[0.0, 0.0], Norm::L2).unwrap();
        assert!((r.distance - (R2 - 1.0)).abs() < 1e-7, "{}", r.distance);
        let zc = 1.0 - 1.0 / R2;
        assert!((r.z_v[0] - zc).abs() < 1e-6 && (r.z_v[1] - zc).abs() < 1e-6);
        assert!((r.w_v[0] - 1.0 / R2).abs() < 1e-6 && (r.w_v[1] - 1.0 / R2).abs() < 1e-6);

        let r = s.norm_min(&[0.0, 0.0], Norm::LInf).unwrap();
        assert!((r.distance - zc).abs() < 1e-7, "{}", r.distance);
        assert!((r.w_v.iter().map(|w| w.abs()).sum::<f64>() - 1.0).abs() < 1e-6, "{:?}", r);

        let r = s.norm_min(&[0.0, 0.0], Norm::L1).unwrap();
        assert!((r.distance - (2.0 - R2)).abs() < 1e-7, "{}", r.distance);
    }

    #[test]
    fn norm_min_interior_point_is_zero() {
        let p = catalog("ex8.1-q2").unwrap();
        let s = Scalarizer::new(&p).unwrap();
        for norm in Norm::ALL {
            let r = s.norm_min(&[2.0, 2.0], norm).unwrap();
            assert_eq!(r.distance, 0.0);
            assert_eq!(r.z_v, vec![0.0, 0.0]);
            assert_eq!(r.w_v, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn halfspaces_from_origin_projection() {
        let p = catalog("ex8.1-q2").unwrap();
        let r = norm_min(&p, &[0.0, 0.0], Norm::L2).unwrap();
        let h = supporting_halfspace(&r).unwrap();
        assert!(angle(h.normal(), &[1.0, 1.0]) < 1e-6);
        assert!((h.offset() - (R2 - 1.0)).abs() < 1e-6, "{}", h.offset());
        let g = lp_halfspace_from_z(&r, 2.0).unwrap();
        assert!(angle(g.normal(), h.normal()) < 1e-6);
        // Tangency: the cut passes through y_v as well.
        assert!(h.slack(&r.y_v).abs() < 1e-6);
    }

    #[test]
    fn l1_normal_sign_pattern() {
        let r = ScalarizationResult {
            v: vec![0.0, 0.0],
            x_v: vec![0.0, 0.0],
            z_v: vec![0.3, -0.2],
            w_v: vec![0.0, 0.0],
            distance: 0.5,
            y_v: vec![0.3, -0.2],
            image: vec![0.3, -0.2],
            norm: Norm::L1,
        };
        let h = lp_halfspace_from_z(&r, 1.0).unwrap();
        assert!(angle(h.normal(), &[1.0, -1.0]) < 1e-12);
        assert!(matches!(supporting_halfspace(&r), Err(Error::DegenerateNormal)));
    }

    #[test]
    fn nonorthant_cone_distance() {
        use crate::cones::OrderingCone;
        let p = catalog("ex8.1-q2")
            .unwrap()
            .with_cone(OrderingCone::builtin("C2", 2).unwrap())
            .unwrap();
        let s = Scalarizer::new(&p).unwrap();
        let r = s.norm_min(&[-1.0, -1.0], Norm::L2).unwrap();
        assert!(r.distance > 0.0);
        assert!(p.cone().dual_contains(&r.w_v, 1e-7));
        assert!(p.cone().leq(&r.image, &r.y_v, 1e-7));
        let ws = s.weighted_sum(&r.w_v).unwrap();
        let gap = r.distance - (ws.value - dot(&r.w_v, &r.v));
        assert!(gap.abs() < 1e-6, "gap {gap}");
    }
}
