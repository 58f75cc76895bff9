//! Log-barrier interior-point method for programs with a linear objective,
//! convex quadratic constraints, second-order cone constraints and bounds.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::QuadraticFunction;

/// `‖a·u + a0‖₂ ≤ cᵀu + d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SocConstraint {
    pub a: DMatrix<f64>,
    pub a0: DVector<f64>,
    pub c: DVector<f64>,
    pub d: f64,
}

impl SocConstraint {
    fn lhs(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.a * u + &self.a0
    }

    fn rhs(&self, u: &DVector<f64>) -> f64 {
        self.c.dot(u) + self.d
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Constraint {
    /// `f(u) ≤ 0`.
    Quadratic(QuadraticFunction),
    SecondOrderCone(SocConstraint),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvexProgram {
    objective: DVector<f64>,
    constraints: Vec<Constraint>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    start: Option<DVector<f64>>,
}

impl ConvexProgram {
    /// Minimize `objectiveᵀu` over free variables; add constraints with the
    /// builder methods.
    pub fn new(objective: Vec<f64>) -> Self {
        let m = objective.len();
        Self {
            objective: DVector::from_vec(objective),
            constraints: Vec::new(),
            lower: vec![f64::NEG_INFINITY; m],
            upper: vec![f64::INFINITY; m],
            start: None,
        }
    }

    pub fn with_quadratic_constraints(mut self, fs: impl IntoIterator<Item = QuadraticFunction>) -> Self {
        self.constraints.extend(fs.into_iter().map(Constraint::Quadratic));
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    /// Bounds on the leading `lo.len()` variables; infinities mean "none".
    pub fn with_bounds(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        for (k, (l, h)) in lo.into_iter().zip(hi).enumerate() {
            self.lower[k] = l;
            self.upper[k] = h;
        }
        self
    }

    /// Strictly feasible starting point; ignored (phase 1 runs) if it is not.
    pub fn with_start(mut self, start: Vec<f64>) -> Self {
        self.start = Some(DVector::from_vec(start));
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    fn rows(&self) -> Vec<Row> {
        let mut rows: Vec<Row> = self
            .constraints
            .iter()
            .map(|c| match c {
                Constraint::Quadratic(f) => Row::Quad(f.clone()),
                Constraint::SecondOrderCone(s) => Row::Soc(s.clone()),
            })
            .collect();
        for (k, l) in self.lower.iter().enumerate() {
            if l.is_finite() {
                rows.push(Row::Lower(k, *l));
            }
        }
        for (k, h) in self.upper.iter().enumerate() {
            if h.is_finite() {
                rows.push(Row::Upper(k, *h));
            }
        }
        rows
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_newton: usize,
    pub mu0: f64,
    pub mu_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_newton: 200,
            mu0: 1.0,
            mu_factor: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal_feas: f64,
    pub complementarity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktSolution {
    pub primal: Vec<f64>,
    /// One per entry of [`ConvexProgram::constraints`]; for a second-order
    /// cone constraint the multiplier belongs to `‖a·u + a0‖² − (cᵀu + d)² ≤ 0`.
    pub multipliers: Vec<f64>,
    pub lower_multipliers: Vec<f64>,
    pub upper_multipliers: Vec<f64>,
    pub objective_value: f64,
    pub residuals: KktResiduals,
    pub newton_steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phase1Result {
    pub point: Vec<f64>,
    /// `−max_i g_i(point)` over constraints (bounds excluded).
    pub margin: f64,
    pub newton_steps: usize,
}

#[derive(Clone, Debug)]
enum Row {
    Quad(QuadraticFunction),
    Soc(SocConstraint),
    Lower(usize, f64),
    Upper(usize, f64),
}

impl Row {
    fn degree(&self) -> f64 {
        match self {
            Row::Soc(_) => 2.0,
            _ => 1.0,
        }
    }

    fn value(&self, u: &DVector<f64>) -> f64 {
        match self {
            Row::Quad(f) => f.eval_vec(u),
            Row::Soc(s) => s.lhs(u).norm_squared() - s.rhs(u).powi(2),
            Row::Lower(k, l) => l - u[*k],
            Row::Upper(k, h) => u[*k] - h,
        }
    }

    fn in_domain(&self, u: &DVector<f64>) -> bool {
        match self {
            Row::Soc(s) => {
                let rhs = s.rhs(u);
                rhs > 0.0 && s.lhs(u).norm() < rhs
            }
            _ => self.value(u) < 0.0,
        }
    }

    fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        match self {
            Row::Quad(f) => f.gradient_vec(u),
            Row::Soc(s) => s.a.transpose() * s.lhs(u) * 2.0 - &s.c * (2.0 * s.rhs(u)),
            Row::Lower(k, _) => unit(u.len(), *k, -1.0),
            Row::Upper(k, _) => unit(u.len(), *k, 1.0),
        }
    }

    /// `h += weight·∇²g`.
    fn add_hessian(&self, h: &mut DMatrix<f64>, weight: f64) {
        match self {
            Row::Quad(f) if !f.is_linear() => *h += f.hessian() * weight,
            Row::Soc(s) => {
                *h += (s.a.transpose() * &s.a) * (2.0 * weight);
                *h -= (&s.c * s.c.transpose()) * (2.0 * weight);
            }
            _ => {}
        }
    }
}

fn unit(m: usize, k: usize, v: f64) -> DVector<f64> {
    let mut e = DVector::zeros(m);
    e[k] = v;
    e
}

struct Barrier<'a> {
    cost: &'a DVector<f64>,
    rows: &'a [Row],
}

impl Barrier<'_> {
    fn feasible(&self, u: &DVector<f64>) -> bool {
        self.rows.iter().all(|r| r.in_domain(u))
    }

    fn value(&self, u: &DVector<f64>, t: f64) -> f64 {
        t * self.cost.dot(u) - self.rows.iter().map(|r| (-r.value(u)).ln()).sum::<f64>()
    }

    fn derivatives(&self, u: &DVector<f64>, t: f64) -> (DVector<f64>, DMatrix<f64>) {
        let m = u.len();
        let mut grad = self.cost * t;
        let mut hess = DMatrix::zeros(m, m);
        for r in self.rows {
            let g = r.value(u);
            let dg = r.gradient(u);
            grad += &dg / -g;
            hess += (&dg * dg.transpose()) / (g * g);
            r.add_hessian(&mut hess, 1.0 / -g);
        }
        (grad, hess)
    }

    fn theta(&self) -> f64 {
        self.rows.iter().map(Row::degree).sum()
    }
}

fn solve_spd(mut h: DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = h.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    let ridge = 1e-12 * h.diagonal().amax().max(1.0);
    for i in 0..h.nrows() {
        h[(i, i)] += ridge;
    }
    h.cholesky().map(|ch| ch.solve(rhs))
}

/// Path following from a strictly feasible `u`; returns the final iterate and `μ`.
fn path_follow(
    barrier: &Barrier,
    mut u: DVector<f64>,
    options: &SolverOptions,
    steps: &mut usize,
) -> Result<(DVector<f64>, f64)> {
    let theta = barrier.theta().max(1.0);
    let mut mu = initial_mu(barrier, &u, options);
    loop {
        let t = 1.0 / mu;
        center(barrier, &mut u, t, options, steps)?;
        if theta * mu <= options.tol {
            return Ok((u, mu));
        }
        mu *= options.mu_factor;
    }
}

/// Least-squares fit of `t∇f + ∇φ ≈ 0` at the start point, so that a badly
/// scaled objective does not spend the Newton budget on the first centering.
/// Never goes below the configured `μ0`.
fn initial_mu(barrier: &Barrier, u: &DVector<f64>, options: &SolverOptions) -> f64 {
    let (grad, hess) = barrier.derivatives(u, 0.0);
    let c = barrier.cost;
    let (Some(hc), Some(hg)) = (solve_spd(hess.clone(), c), solve_spd(hess, &grad)) else {
        return options.mu0;
    };
    let den = c.dot(&hc);
    let t = -c.dot(&hg) / den;
    if !(den > 0.0) || !(t > 0.0) || !t.is_finite() {
        return options.mu0;
    }
    (1.0 / t).clamp(options.mu0, options.mu0 * 1e8)
}

fn center(
    barrier: &Barrier,
    u: &mut DVector<f64>,
    t: f64,
    options: &SolverOptions,
    steps: &mut usize,
) -> Result<()> {
    let mut previous = f64::INFINITY;
    loop {
        let (grad, hess) = barrier.derivatives(u, t);
        let dir = solve_spd(hess, &(-&grad))
            .ok_or_else(|| Error::Numerical("singular Newton system".into()))?;
        let slope = grad.dot(&dir);
        if !slope.is_finite() {
            return Err(Error::Numerical("non-finite Newton step".into()));
        }
        let decrement = -slope;
        let f0 = barrier.value(u, t);
        // Quadratic convergence has stopped: the decrement sits at the
        // rounding floor of the barrier value.
        let floor = 1e-6_f64.max(1e-13 * f0.abs());
        if decrement / 2.0 <= 1e-10 || (decrement <= floor && decrement > 0.5 * previous) {
            return Ok(());
        }
        previous = decrement;
        if *steps >= options.max_newton {
            return Err(Error::MaxIterations(options.max_newton));
        }
        *steps += 1;
        let noise = 1e-13 * (1.0 + f0.abs());
        let mut s = 1.0;
        let mut moved = false;
        while s > 1e-14 {
            let cand = &*u + &dir * s;
            if barrier.feasible(&cand) && barrier.value(&cand, t) <= f0 + 0.25 * s * slope + noise {
                *u = cand;
                moved = true;
                break;
            }
            s *= 0.5;
        }
        // Self-concordance guarantees the full step once λ² is this small,
        // so a shortened step means rounding, not distance from the center.
        if decrement <= 0.1 && (!moved || s < 1.0) {
            return Ok(());
        }
        if !moved {
            return Err(Error::Numerical(format!("line search stalled, Newton decrement {decrement:e}")));
        }
    }
}

const REFINEMENTS: usize = 8;

struct Refined {
    u: DVector<f64>,
    lambda: Vec<f64>,
}

fn kkt_residual(cost: &DVector<f64>, rows: &[Row], u: &DVector<f64>, lambda: &[f64]) -> (f64, f64) {
    let mut r = cost.clone();
    let mut comp = 0.0;
    for (row, l) in rows.iter().zip(lambda) {
        r += row.gradient(u) * *l;
        comp += l * row.value(u).abs();
    }
    (r.norm(), comp)
}

/// One Newton step on the complementarity-targeting KKT system, kept only
/// if it reduces the combined residual.
fn refine(cost: &DVector<f64>, rows: &[Row], u: &DVector<f64>, lambda: &[f64]) -> Option<Refined> {
    let m = u.len();
    let mut h = DMatrix::zeros(m, m);
    let mut grads = Vec::with_capacity(rows.len());
    let mut vals = Vec::with_capacity(rows.len());
    for (row, l) in rows.iter().zip(lambda) {
        let g = row.value(u);
        let dg = row.gradient(u);
        row.add_hessian(&mut h, *l);
        h += (&dg * dg.transpose()) * (l / -g);
        grads.push(dg);
        vals.push(g);
    }
    let du = solve_spd(h, &(-cost))?;
    let dl: Vec<f64> = lambda
        .iter()
        .zip(grads.iter().zip(&vals))
        .map(|(l, (dg, g))| -l - (l / g) * dg.dot(&du))
        .collect();
    let mut s: f64 = 1.0;
    for (l, d) in lambda.iter().zip(&dl) {
        if *d < 0.0 {
            s = s.min(-l / d);
        }
    }
    s *= 0.99;
    let barrier = Barrier { cost, rows };
    let mut cand = u + &du * s;
    while !barrier.feasible(&cand) {
        s *= 0.5;
        if s < 1e-8 {
            return None;
        }
        cand = u + &du * s;
    }
    let new_lambda: Vec<f64> = lambda.iter().zip(&dl).map(|(l, d)| l + s * d).collect();
    let (st0, c0) = kkt_residual(cost, rows, u, lambda);
    let (st1, c1) = kkt_residual(cost, rows, &cand, &new_lambda);
    (st1 + c1 < st0 + c0).then_some(Refined {
        u: cand,
        lambda: new_lambda,
    })
}

/// Minimizes an auxiliary slack `σ ≥ −1` with every constraint relaxed by
/// `σ`, bounds kept hard (free variables get an artificial box of radius 1e6).
pub fn phase1(program: &ConvexProgram, options: &SolverOptions) -> Result<Phase1Result> {
    const RADIUS: f64 = 1e6;
    let m = program.num_vars();
    let mut lo = Vec::with_capacity(m + 1);
    let mut hi = Vec::with_capacity(m + 1);
    let mut u0 = DVector::zeros(m + 1);
    for k in 0..m {
        let l = if program.lower[k].is_finite() { program.lower[k] } else { -RADIUS };
        let h = if program.upper[k].is_finite() { program.upper[k] } else { RADIUS };
        if l >= h {
            return Err(Error::Infeasible(l - h));
        }
        lo.push(l);
        hi.push(h);
        u0[k] = 0.5 * (l + h);
    }
    lo.push(-1.0);
    hi.push(f64::INFINITY);

    let mut worst: f64 = -1.0;
    let mut aux = ConvexProgram::new({
        let mut c = vec![0.0; m + 1];
        c[m] = 1.0;
        c
    });
    let base = u0.rows(0, m).into_owned();
    for c in &program.constraints {
        let relaxed = match c {
            Constraint::Quadratic(f) => {
                worst = worst.max(f.eval_vec(&base));
                Constraint::Quadratic(f.embed(m + 1).with_linear_terms(m, &[-1.0]))
            }
            Constraint::SecondOrderCone(s) => {
                worst = worst.max(s.lhs(&base).norm() - s.rhs(&base));
                let mut a = DMatrix::zeros(s.a.nrows(), m + 1);
                a.view_mut((0, 0), (s.a.nrows(), m)).copy_from(&s.a);
                let mut c = DVector::zeros(m + 1);
                c.rows_mut(0, m).copy_from(&s.c);
                c[m] = 1.0;
                Constraint::SecondOrderCone(SocConstraint {
                    a,
                    a0: s.a0.clone(),
                    c,
                    d: s.d,
                })
            }
        };
        aux = aux.with_constraint(relaxed);
    }
    aux = aux.with_bounds(lo, hi);
    u0[m] = worst + 1.0;

    let rows = aux.rows();
    let barrier = Barrier {
        cost: &aux.objective,
        rows: &rows,
    };
    let mut steps = 0;
    let (u, _) = path_follow(&barrier, u0, options, &mut steps)?;
    let sigma = u[m];
    if sigma >= -1e-10 {
        return Err(Error::Infeasible(sigma));
    }
    let point = u.rows(0, m).into_owned();
    let margin = -program
        .constraints
        .iter()
        .map(|c| match c {
            Constraint::Quadratic(f) => f.eval_vec(&point),
            Constraint::SecondOrderCone(s) => s.lhs(&point).norm() - s.rhs(&point),
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Phase1Result {
        point: point.iter().copied().collect(),
        margin,
        newton_steps: steps,
    })
}

pub fn solve(program: &ConvexProgram, options: &SolverOptions) -> Result<KktSolution> {
    let rows = program.rows();
    let barrier = Barrier {
        cost: &program.objective,
        rows: &rows,
    };
    let mut steps = 0;
    let start = match &program.start {
        Some(s) if s.len() == program.num_vars() && barrier.feasible(s) => s.clone(),
        _ => {
            let p1 = phase1(program, options)?;
            DVector::from_vec(p1.point)
        }
    };
    if !barrier.feasible(&start) {
        return Err(Error::Numerical("phase 1 point is not strictly feasible".into()));
    }
    let (mut u, mu) = path_follow(&barrier, start, options, &mut steps)?;
    let mut lambda: Vec<f64> = rows.iter().map(|r| mu / -r.value(&u)).collect();
    for _ in 0..REFINEMENTS {
        let Some(r) = refine(&program.objective, &rows, &u, &lambda) else { break };
        u = r.u;
        lambda = r.lambda;
        let (st, comp) = kkt_residual(&program.objective, &rows, &u, &lambda);
        if st <= 1e-3 * options.tol && comp <= 1e-3 * options.tol {
            break;
        }
    }

    let (stationarity, complementarity) = kkt_residual(&program.objective, &rows, &u, &lambda);
    let primal_feas = rows.iter().map(|r| r.value(&u)).fold(0.0, f64::max);
    let nc = program.constraints.len();
    let mut lower_multipliers = vec![0.0; program.num_vars()];
    let mut upper_multipliers = vec![0.0; program.num_vars()];
    for (row, l) in rows.iter().zip(&lambda).skip(nc) {
        match row {
            Row::Lower(k, _) => lower_multipliers[*k] = *l,
            Row::Upper(k, _) => upper_multipliers[*k] = *l,
            _ => unreachable!("constraint rows come first"),
        }
    }
    Ok(KktSolution {
        objective_value: program.objective.dot(&u),
        primal: u.iter().copied().collect(),
        multipliers: lambda[..nc].to_vec(),
        lower_multipliers,
        upper_multipliers,
        residuals: KktResiduals {
            stationarity,
            primal_feas,
            complementarity,
        },
        newton_steps: steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(q: &[f64], b: &[f64], c: f64) -> QuadraticFunction {
        let n = b.len();
        QuadraticFunction::new(DMatrix::from_row_slice(n, n, q), DVector::from_row_slice(b), c).unwrap()
    }

    fn check_residuals(sol: &KktSolution, cost_norm: f64) {
        let tol = SolverOptions::default().tol;
        assert!(sol.residuals.stationarity <= tol * (1.0 + cost_norm), "{:?}", sol.residuals);
        assert!(sol.residuals.primal_feas <= tol, "{:?}", sol.residuals);
        assert!(sol.residuals.complementarity <= tol, "{:?}", sol.residuals);
        assert!(sol.multipliers.iter().all(|l| *l >= -1e-9));
    }

    #[test]
    fn interval_endpoint_multiplier() {
        let prog = ConvexProgram::new(vec![1.0]).with_quadratic_constraints([quad(&[2.0], &[0.0], -1.0)]);
        let sol = solve(&prog, &SolverOptions::default()).unwrap();
        assert!((sol.primal[0] + 1.0).abs() < 1e-8, "{:?}", sol.primal);
        assert!((sol.multipliers[0] - 0.5).abs() < 1e-6, "{:?}", sol.multipliers);
        check_residuals(&sol, 1.0);
    }

    #[test]
    fn linear_cost_over_disc() {
        let prog = ConvexProgram::new(vec![1.0, 1.0])
            .with_quadratic_constraints([quad(&[1.0, 0.0, 0.0, 1.0], &[-1.0, -1.0], 0.5)]);
        let sol = solve(&prog, &SolverOptions::default()).unwrap();
        let s = 1.0 - 1.0 / 2f64.sqrt();
        assert!((sol.primal[0] - s).abs() < 1e-7 && (sol.primal[1] - s).abs() < 1e-7);
        assert!((sol.objective_value - (2.0 - 2f64.sqrt())).abs() < 1e-8);
        check_residuals(&sol, 2f64.sqrt());
    }

    #[test]
    fn zero_cost_returns_feasible_point() {
        let prog = ConvexProgram::new(vec![0.0, 0.0])
            .with_quadratic_constraints([quad(&[1.0, 0.0, 0.0, 1.0], &[0.0, 0.0], -0.5)]);
        let sol = solve(&prog, &SolverOptions::default()).unwrap();
        assert!(sol.primal.iter().map(|x| x * x).sum::<f64>() < 1.0);
        check_residuals(&sol, 0.0);
    }

    #[test]
    fn bounds_carry_multipliers() {
        let prog = ConvexProgram::new(vec![1.0, -2.0]).with_bounds(vec![0.0, 0.0], vec![1.0, 3.0]);
        let sol = solve(&prog, &SolverOptions::default()).unwrap();
        assert!((sol.primal[0]).abs() < 1e-8 && (sol.primal[1] - 3.0).abs() < 1e-8);
        assert!((sol.lower_multipliers[0] - 1.0).abs() < 1e-6);
        assert!((sol.upper_multipliers[1] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn second_order_cone_distance() {
        // min t  s.t. ‖(x − 3, y − 4)‖ ≤ t  with x, y ≤ 0.
        let soc = SocConstraint {
            a: DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            a0: DVector::from_row_slice(&[-3.0, -4.0]),
            c: DVector::from_row_slice(&[0.0, 0.0, 1.0]),
            d: 0.0,
        };
        let prog = ConvexProgram::new(vec![0.0, 0.0, 1.0])
            .with_constraint(Constraint::SecondOrderCone(soc))
            .with_bounds(vec![f64::NEG_INFINITY; 2], vec![0.0, 0.0]);
        let sol = solve(&prog, &SolverOptions::default()).unwrap();
        assert!((sol.objective_value - 5.0).abs() < 1e-7, "{}", sol.objective_value);
        check_residuals(&sol, 1.0);
    }

    #[test]
    fn phase1_examples() {
        let prog = ConvexProgram::new(vec![0.0]).with_quadratic_constraints([quad(&[2.0], &[0.0], -1.0)]);
        let p1 = phase1(&prog, &SolverOptions::default()).unwrap();
        assert!(p1.point[0].abs() < 1.0 && p1.margin > 0.0);
        let prog = ConvexProgram::new(vec![0.0]).with_quadratic_constraints([
            QuadraticFunction::linear(vec![1.0], 1.0),
            QuadraticFunction::linear(vec![-1.0], 1.0),
        ]);
        assert!(matches!(phase1(&prog, &SolverOptions::default()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn unbounded_program_fails_cleanly() {
        let prog = ConvexProgram::new(vec![1.0]);
        assert!(solve(&prog, &SolverOptions::default()).is_err());
    }

    /// Brute-force minimum of `cᵀu` over a fine grid of the feasible box.
    fn grid_oracle(cost: &[f64], cons: &[QuadraticFunction], lo: f64, hi: f64) -> f64 {
        let k = 2001;
        let h = (hi - lo) / (k - 1) as f64;
        let mut best = f64::INFINITY;
        for i in 0..k {
            for j in 0..k {
                let u = [lo + i as f64 * h, lo + j as f64 * h];
                if cons.iter().all(|g| g.eval(&u) <= 0.0) {
                    best = best.min(cost[0] * u[0] + cost[1] * u[1]);
                }
            }
        }
        best
    }

    #[test]
    fn random_programs_match_grid_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let cost = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let center = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
            let a = rng.gen_range(0.5..2.0);
            let ball = quad(
                &[2.0 * a, 0.0, 0.0, 2.0],
                &[-2.0 * a * center[0], -2.0 * center[1]],
                a * center[0].powi(2) + center[1].powi(2) - 1.0,
            );
            let cut = QuadraticFunction::linear(vec![rng.gen_range(-1.0..1.0), 1.0], rng.gen_range(-0.3..0.0));
            let cons = vec![ball, cut];
            let prog = ConvexProgram::new(cost.clone())
                .with_quadratic_constraints(cons.clone())
                .with_bounds(vec![-2.0; 2], vec![2.0; 2]);
            let sol = solve(&prog, &SolverOptions::default()).unwrap();
            let oracle = grid_oracle(&cost, &cons, -2.0, 2.0);
            // Grid spacing 2e-3 bounds the oracle error by about 3e-3·‖c‖.
            assert!(sol.objective_value <= oracle + 1e-9);
            assert!(oracle - sol.objective_value < 4e-3, "{} vs {}", sol.objective_value, oracle);
        }
    }
}
