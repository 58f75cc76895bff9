//! Convex vector optimization problems with quadratic data over a box.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::cones::{ConeSpec, OrderingCone};
use crate::convex_solver::{self, ConvexProgram, SolverOptions};
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-9;

/// `x ↦ ½ xᵀQx + bᵀx + c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawQuadratic", into = "RawQuadratic")]
pub struct QuadraticFunction {
    hessian: DMatrix<f64>,
    linear: DVector<f64>,
    constant: f64,
    is_linear: bool,
}

#[derive(Serialize, Deserialize)]
struct RawQuadratic {
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    q: Option<Vec<Vec<f64>>>,
    b: Vec<f64>,
    #[serde(default)]
    c: f64,
}

impl TryFrom<RawQuadratic> for QuadraticFunction {
    type Error = Error;

    fn try_from(raw: RawQuadratic) -> Result<Self> {
        let n = raw.b.len();
        let hessian = match raw.q {
            None => DMatrix::zeros(n, n),
            Some(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(Error::DimensionMismatch(format!("Q must be {n}x{n}")));
                }
                DMatrix::from_fn(n, n, |i, j| rows[i][j])
            }
        };
        QuadraticFunction::new(hessian, DVector::from_vec(raw.b), raw.c)
    }
}

impl From<QuadraticFunction> for RawQuadratic {
    fn from(f: QuadraticFunction) -> Self {
        let n = f.dim();
        RawQuadratic {
            q: (!f.is_linear).then(|| {
                (0..n).map(|i| (0..n).map(|j| f.hessian[(i, j)]).collect()).collect()
            }),
            b: f.linear.iter().copied().collect(),
            c: f.constant,
        }
    }
}

impl QuadraticFunction {
    pub fn new(hessian: DMatrix<f64>, linear: DVector<f64>, constant: f64) -> Result<Self> {
        let n = linear.len();
        if hessian.nrows() != n || hessian.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "Hessian {}x{} for {n} variables",
                hessian.nrows(),
                hessian.ncols()
            )));
        }
        if (&hessian - hessian.transpose()).amax() > SYMMETRY_TOL {
            return Err(Error::InvalidProblem("quadratic form is not symmetric".into()));
        }
        if !hessian.iter().chain(linear.iter()).all(|v| v.is_finite()) || !constant.is_finite() {
            return Err(Error::InvalidProblem("non-finite quadratic coefficients".into()));
        }
        let is_linear = hessian.iter().all(|&v| v == 0.0);
        Ok(Self {
            hessian,
            linear,
            constant,
            is_linear,
        })
    }

    pub fn linear(b: Vec<f64>, c: f64) -> Self {
        let n = b.len();
        Self {
            hessian: DMatrix::zeros(n, n),
            linear: DVector::from_vec(b),
            constant: c,
            is_linear: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub fn linear_part(&self) -> &DVector<f64> {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn is_linear(&self) -> bool {
        self.is_linear
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        self.eval_vec(&x)
    }

    pub(crate) fn eval_vec(&self, x: &DVector<f64>) -> f64 {
        let quad = if self.is_linear {
            0.0
        } else {
            0.5 * x.dot(&(&self.hessian * x))
        };
        quad + self.linear.dot(x) + self.constant
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        self.gradient_vec(&x).iter().copied().collect()
    }

    pub(crate) fn gradient_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        if self.is_linear {
            self.linear.clone()
        } else {
            &self.hessian * x + &self.linear
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.hessian)
    }

    /// `Σ w_i f_i` of functions on the same variables.
    pub fn combination(weights: &[f64], fs: &[QuadraticFunction]) -> Self {
        let n = fs.first().map_or(0, QuadraticFunction::dim);
        let mut hessian = DMatrix::zeros(n, n);
        let mut linear = DVector::zeros(n);
        let mut constant = 0.0;
        for (w, f) in weights.iter().zip(fs) {
            if !f.is_linear {
                hessian += &f.hessian * *w;
            }
            linear += &f.linear * *w;
            constant += w * f.constant;
        }
        let is_linear = hessian.iter().all(|&v| v == 0.0);
        Self {
            hessian,
            linear,
            constant,
            is_linear,
        }
    }

    /// Same function written over `m ≥ n` variables, the originals occupying
    /// the first `n` slots.
    pub fn embed(&self, m: usize) -> Self {
        let n = self.dim();
        let mut hessian = DMatrix::zeros(m, m);
        hessian.view_mut((0, 0), (n, n)).copy_from(&self.hessian);
        let mut linear = DVector::zeros(m);
        linear.rows_mut(0, n).copy_from(&self.linear);
        Self {
            hessian,
            linear,
            constant: self.constant,
            is_linear: self.is_linear,
        }
    }

    /// Adds `Σ coeffs[k]·u_{offset+k}` to the linear part.
    pub fn with_linear_terms(mut self, offset: usize, coeffs: &[f64]) -> Self {
        for (k, c) in coeffs.iter().enumerate() {
            self.linear[offset + k] += c;
        }
        self
    }

    pub fn shifted(mut self, delta: f64) -> Self {
        self.constant += delta;
        self
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

/// Minimize `Γ(x)` with respect to `≤_C` subject to `g_i(x) ≤ 0` and `x` in a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct ProblemSpec {
    name: String,
    n: usize,
    objectives: Vec<QuadraticFunction>,
    constraints: Vec<QuadraticFunction>,
    bounds: BoxBounds,
    cone: OrderingCone,
}

#[derive(Serialize, Deserialize)]
struct RawProblem {
    #[serde(default)]
    name: Option<String>,
    n: usize,
    q: usize,
    objectives: Vec<QuadraticFunction>,
    #[serde(default)]
    constraints: Vec<QuadraticFunction>,
    #[serde(rename = "box")]
    bounds: BoxBounds,
    cone: ConeSpec,
}

impl TryFrom<RawProblem> for ProblemSpec {
    type Error = Error;

    fn try_from(raw: RawProblem) -> Result<Self> {
        if raw.objectives.len() != raw.q {
            return Err(Error::DimensionMismatch(format!(
                "q = {} but {} objectives",
                raw.q,
                raw.objectives.len()
            )));
        }
        let cone = raw.cone.resolve(raw.q)?;
        let p = ProblemSpec::new(raw.objectives, raw.constraints, raw.bounds, cone)?;
        if p.n != raw.n {
            return Err(Error::DimensionMismatch(format!("n = {} but data has {}", raw.n, p.n)));
        }
        Ok(p.named(raw.name.unwrap_or_else(|| "custom".into())))
    }
}

impl From<ProblemSpec> for RawProblem {
    fn from(p: ProblemSpec) -> Self {
        let q = p.q();
        RawProblem {
            name: Some(p.name),
            n: p.n,
            q,
            objectives: p.objectives,
            constraints: p.constraints,
            bounds: p.bounds,
            cone: ConeSpec::Generators {
                primal: Some(p.cone.primal_generators().to_vec()),
                dual: Some(p.cone.dual_generators().to_vec()),
            },
        }
    }
}

/// Outcome of the positive semidefiniteness tests behind C-convexity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub pass: bool,
    pub failures: Vec<ConvexityFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexityFailure {
    /// `Σ_i w_i Q_i` is indefinite for dual generator `generator`.
    Objective { generator: usize, min_eigenvalue: f64 },
    Constraint { index: usize, min_eigenvalue: f64 },
}

impl ProblemSpec {
    pub fn new(
        objectives: Vec<QuadraticFunction>,
        constraints: Vec<QuadraticFunction>,
        bounds: BoxBounds,
        cone: OrderingCone,
    ) -> Result<Self> {
        let n = bounds.lo.len();
        if n == 0 || bounds.hi.len() != n {
            return Err(Error::DimensionMismatch("box bounds must be nonempty and of equal length".into()));
        }
        if objectives.is_empty() {
            return Err(Error::InvalidProblem("no objectives".into()));
        }
        if objectives.iter().chain(&constraints).any(|f| f.dim() != n) {
            return Err(Error::DimensionMismatch(format!(
                "every objective and constraint must have {n} variables"
            )));
        }
        if cone.dim() != objectives.len() {
            return Err(Error::DimensionMismatch(format!(
                "cone dimension {} but q = {}",
                cone.dim(),
                objectives.len()
            )));
        }
        for (lo, hi) in bounds.lo.iter().zip(&bounds.hi) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidProblem(format!("box side [{lo}, {hi}] must be finite with lo < hi")));
            }
        }
        Ok(Self {
            name: "custom".into(),
            n,
            objectives,
            constraints,
            bounds,
            cone,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_cone(mut self, cone: OrderingCone) -> Result<Self> {
        if cone.dim() != self.q() {
            return Err(Error::DimensionMismatch(format!(
                "cone dimension {} but q = {}",
                cone.dim(),
                self.q()
            )));
        }
        self.cone = cone;
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.objectives.len()
    }

    pub fn objectives(&self) -> &[QuadraticFunction] {
        &self.objectives
    }

    pub fn constraints(&self) -> &[QuadraticFunction] {
        &self.constraints
    }

    pub fn bounds(&self) -> &BoxBounds {
        &self.bounds
    }

    pub fn cone(&self) -> &OrderingCone {
        &self.cone
    }

    pub fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        self.objectives.iter().map(|f| f.eval_vec(&x)).collect()
    }

    /// Row `i` is `Q_i x + b_i`.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let x = DVector::from_column_slice(x);
        let mut jac = DMatrix::zeros(self.q(), self.n);
        for (i, f) in self.objectives.iter().enumerate() {
            jac.set_row(i, &f.gradient_vec(&x).transpose());
        }
        jac
    }

    /// `x ↦ wᵀΓ(x)`.
    pub fn weighted_objective(&self, w: &[f64]) -> QuadraticFunction {
        QuadraticFunction::combination(w, &self.objectives)
    }

    /// Largest constraint value; box violations count as constraint values.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let box_viol = x
            .iter()
            .zip(self.bounds.lo.iter().zip(&self.bounds.hi))
            .map(|(xi, (lo, hi))| (lo - xi).max(xi - hi))
            .fold(f64::NEG_INFINITY, f64::max);
        self.constraints
            .iter()
            .map(|g| g.eval(x))
            .fold(box_viol, f64::max)
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.max_violation(x) <= tol
    }

    pub fn check_c_convexity(&self) -> ConvexityReport {
        let mut failures = Vec::new();
        for (j, w) in self.cone.dual_generators().iter().enumerate() {
            let f = self.weighted_objective(w);
            if f.is_linear() {
                continue;
            }
            let scale = f.hessian().amax().max(1.0);
            let min = f.min_eigenvalue();
            if min < -PSD_TOL * scale {
                failures.push(ConvexityFailure::Objective {
                    generator: j,
                    min_eigenvalue: min,
                });
            }
        }
        for (i, g) in self.constraints.iter().enumerate() {
            if g.is_linear() {
                continue;
            }
            let scale = g.hessian().amax().max(1.0);
            let min = g.min_eigenvalue();
            if min < -PSD_TOL * scale {
                failures.push(ConvexityFailure::Constraint {
                    index: i,
                    min_eigenvalue: min,
                });
            }
        }
        ConvexityReport {
            pass: failures.is_empty(),
            failures,
        }
    }

    /// The feasible region as a program in `x` with zero cost.
    pub(crate) fn feasibility_program(&self) -> ConvexProgram {
        ConvexProgram::new(vec![0.0; self.n])
            .with_quadratic_constraints(self.constraints.clone())
            .with_bounds(self.bounds.lo.clone(), self.bounds.hi.clone())
    }

    /// A point strictly inside the box with every constraint strictly slack.
    pub fn interior_point(&self) -> Result<Vec<f64>> {
        let program = self.feasibility_program();
        let p1 = convex_solver::phase1(&program, &SolverOptions::default())?;
        Ok(p1.point)
    }

    /// Largest box-corner value of `x ↦ wᵀΓ(x)`; bounds the supremum over
    /// the feasible region whenever that function is convex.
    pub fn box_corner_max(&self, w: &[f64]) -> Result<f64> {
        if self.n > 20 {
            return Err(Error::DimensionTooLarge(self.n));
        }
        let f = self.weighted_objective(w);
        let mut corner = vec![0.0; self.n];
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1u32 << self.n) {
            for (k, c) in corner.iter_mut().enumerate() {
                *c = if mask >> k & 1 == 1 { self.bounds.hi[k] } else { self.bounds.lo[k] };
            }
            best = best.max(f.eval(&corner));
        }
        Ok(best)
    }
}

pub const CATALOG: [&str; 6] = ["ex8.1-q2", "ex8.1-q3", "ex8.1-q4", "ex8.2", "ex8.3a", "ex8.3b"];

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

fn sphere_objective(n: usize, b: Vec<f64>, c: f64) -> QuadraticFunction {
    QuadraticFunction::new(DMatrix::identity(n, n) * 2.0, DVector::from_vec(b), c)
        .expect("well-formed catalog data")
}

fn ball_example(q: usize) -> ProblemSpec {
    let objectives = (0..q).map(|i| QuadraticFunction::linear(unit(q, i), 0.0)).collect();
    let ball = QuadraticFunction::new(
        DMatrix::identity(q, q),
        DVector::from_element(q, -1.0),
        q as f64 / 2.0 - 0.5,
    )
    .expect("well-formed catalog data");
    let bounds = BoxBounds {
        lo: vec![0.0; q],
        hi: vec![2.0; q],
    };
    ProblemSpec::new(objectives, vec![ball], bounds, OrderingCone::orthant(q)).expect("valid catalog problem")
}

fn anchor_example() -> ProblemSpec {
    let anchors = [[1.0, 1.0], [2.0, 3.0], [4.0, 2.0]];
    let objectives = anchors
        .iter()
        .map(|a| sphere_objective(2, vec![-2.0 * a[0], -2.0 * a[1]], a[0] * a[0] + a[1] * a[1]))
        .collect();
    let budget = QuadraticFunction::linear(vec![1.0, 2.0], -10.0);
    let bounds = BoxBounds {
        lo: vec![0.0, 0.0],
        hi: vec![10.0, 4.0],
    };
    ProblemSpec::new(objectives, vec![budget], bounds, OrderingCone::orthant(3)).expect("valid catalog problem")
}

fn tiled_example(copies: usize) -> ProblemSpec {
    let base = [
        [0.0, 10.0, 120.0],
        [80.0, -448.0, 80.0],
        [-448.0, 80.0, 80.0],
    ];
    let n = 3 * copies;
    let objectives = base
        .iter()
        .map(|b| sphere_objective(n, b.iter().copied().cycle().take(n).collect(), 0.0))
        .collect();
    let ball = QuadraticFunction::new(DMatrix::identity(n, n), DVector::zeros(n), -50.0)
        .expect("well-formed catalog data");
    let bounds = BoxBounds {
        lo: vec![0.0; n],
        hi: vec![10.0; n],
    };
    ProblemSpec::new(objectives, vec![ball], bounds, OrderingCone::orthant(3)).expect("valid catalog problem")
}

/// Built-in benchmark problems, all ordered by the nonnegative orthant.
pub fn catalog(name: &str) -> Result<ProblemSpec> {
    let p = match name {
        "ex8.1-q2" => ball_example(2),
        "ex8.1-q3" => ball_example(3),
        "ex8.1-q4" => ball_example(4),
        "ex8.2" => anchor_example(),
        "ex8.3a" => tiled_example(1),
        "ex8.3b" => tiled_example(3),
        other => return Err(Error::UnknownName(other.to_string())),
    };
    Ok(p.named(name))
}
