//! Line-search SQP with damped BFGS, an l1 merit function, box trust regions
//! and second-order correction. QP subproblems go to `quadprog`.

use log::{debug, trace};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ w`.
    fn tmul_vec(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, wi) in w.iter().enumerate() {
            if *wi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += wi * a;
                }
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Objective, constraints and first derivatives at one point.
/// Equalities are `c_eq = 0`, inequalities `c_in >= 0`.
#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub f: f64,
    pub grad: Vec<f64>,
    pub c_eq: Vec<f64>,
    pub c_in: Vec<f64>,
    pub j_eq: Matrix,
    pub j_in: Matrix,
}

impl Evaluation {
    /// Largest constraint violation.
    pub fn violation(&self) -> f64 {
        let eq = inf_norm(&self.c_eq);
        self.c_in.iter().fold(eq, |m, c| m.max(-c))
    }

    fn l1_violation(&self) -> f64 {
        self.c_eq.iter().map(|c| c.abs()).sum::<f64>()
            + self.c_in.iter().map(|c| (-c).max(0.0)).sum::<f64>()
    }
}

pub(crate) trait Nlp {
    fn dim(&self) -> usize;
    /// Full evaluation. `jacobian = false` may leave the derivative fields empty.
    fn evaluate(&self, x: &[f64], jacobian: bool) -> Evaluation;
    /// Hard lower bounds on the variables (`-inf` for none).
    fn lower_bounds(&self) -> Vec<f64>;
    /// Initial and maximum per-variable step bounds.
    fn trust_radius(&self, x: &[f64]) -> Vec<f64>;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SqpOptions {
    pub max_iterations: usize,
    pub constraint_tolerance: f64,
    pub opt_tolerance: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct SqpOutcome {
    pub x: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub violation: f64,
}

struct QpStep {
    d: Vec<f64>,
    /// Multipliers for `c_eq = 0` and `c_in >= 0` in the `L = f - λᵀc` convention.
    lambda_eq: Vec<f64>,
    lambda_in: Vec<f64>,
    /// Whether any trust-region row is active.
    hit_box: bool,
    /// l1 violation of the linearized constraints at `d`.
    linear_violation: f64,
}

/// Solve the SQP subproblem; falls back to an elastic formulation when the
/// linearized constraints are inconsistent within the trust region.
fn solve_subproblem(
    b: &Matrix,
    ev: &Evaluation,
    c_eq: &[f64],
    c_in: &[f64],
    upper: &[f64],
    lower: &[f64],
    penalty: f64,
) -> Option<QpStep> {
    let n = b.cols;
    let (m_eq, m_in) = (c_eq.len(), c_in.len());

    let mut a = Vec::with_capacity((m_eq + m_in + 2 * n) * n);
    let mut rhs = Vec::with_capacity(m_eq + m_in + 2 * n);
    for (i, c) in c_eq.iter().enumerate() {
        a.extend_from_slice(ev.j_eq.row(i));
        rhs.push(-c);
    }
    for (i, c) in c_in.iter().enumerate() {
        a.extend(ev.j_in.row(i).iter().map(|v| -v));
        rhs.push(*c);
    }
    push_box_rows(&mut a, &mut rhs, n, n, upper, lower);

    let mut q = b.data.clone();
    if let Ok(sol) = quadprog::solve_qp(&mut q, &ev.grad, &a, &rhs, m_eq, false) {
        let hit_box = box_active(&sol.iact, m_eq + m_in);
        let lambda_eq = equality_multipliers(&b.data, &ev.grad, &a, m_eq, &sol.sol, &sol.lagr);
        return Some(QpStep {
            d: sol.sol,
            lambda_eq,
            lambda_in: sol.lagr[m_eq..m_eq + m_in].to_vec(),
            hit_box,
            linear_violation: 0.0,
        });
    }
    trace!("QP inconsistent, switching to elastic mode");
    elastic_subproblem(b, ev, c_eq, c_in, upper, lower, penalty)
}

fn push_box_rows(
    a: &mut Vec<f64>,
    rhs: &mut Vec<f64>,
    n: usize,
    width: usize,
    upper: &[f64],
    lower: &[f64],
) {
    for i in 0..n {
        let mut row = vec![0.0; width];
        row[i] = 1.0;
        a.extend_from_slice(&row);
        rhs.push(upper[i]);
        row[i] = -1.0;
        a.extend_from_slice(&row);
        rhs.push(lower[i]);
    }
}

fn box_active(iact: &[usize], first_box_row: usize) -> bool {
    // quadprog reports 1-based constraint indices.
    iact.iter().any(|&k| k > first_box_row)
}

/// Variables `[d, s, p, q]`: `s >= 0` relaxes each inequality, `p, q >= 0`
/// relax each equality as `J d + c = p - q`. Slacks cost `penalty` each.
fn elastic_subproblem(
    b: &Matrix,
    ev: &Evaluation,
    c_eq: &[f64],
    c_in: &[f64],
    upper: &[f64],
    lower: &[f64],
    penalty: f64,
) -> Option<QpStep> {
    let n = b.cols;
    let (m_eq, m_in) = (c_eq.len(), c_in.len());
    let width = n + m_in + 2 * m_eq;

    let mut q = vec![0.0; width * width];
    for i in 0..n {
        q[i * width..i * width + n].copy_from_slice(b.row(i));
    }
    let slack_curvature = 1e-8 * penalty.max(1.0);
    for i in n..width {
        q[i * width + i] = slack_curvature;
    }
    let mut c = ev.grad.clone();
    c.resize(width, penalty);

    let mut a = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..m_eq {
        let mut row = ev.j_eq.row(i).to_vec();
        row.resize(width, 0.0);
        row[n + m_in + i] = -1.0;
        row[n + m_in + m_eq + i] = 1.0;
        a.extend_from_slice(&row);
        rhs.push(-c_eq[i]);
    }
    for i in 0..m_in {
        let mut row: Vec<f64> = ev.j_in.row(i).iter().map(|v| -v).collect();
        row.resize(width, 0.0);
        row[n + i] = -1.0;
        a.extend_from_slice(&row);
        rhs.push(c_in[i]);
    }
    for i in n..width {
        let mut row = vec![0.0; width];
        row[i] = -1.0;
        a.extend_from_slice(&row);
        rhs.push(0.0);
    }
    push_box_rows(&mut a, &mut rhs, n, width, upper, lower);

    let q_orig = q.clone();
    let sol = quadprog::solve_qp(&mut q, &c, &a, &rhs, m_eq, false).ok()?;
    let d = sol.sol[..n].to_vec();
    let linear_violation = sol.sol[n..].iter().map(|s| s.max(0.0)).sum();
    Some(QpStep {
        d,
        lambda_eq: equality_multipliers(&q_orig, &c, &a, m_eq, &sol.sol, &sol.lagr),
        lambda_in: sol.lagr[m_eq..m_eq + m_in].to_vec(),
        hit_box: box_active(&sol.iact, m_eq + m_in + width - n),
        linear_violation,
    })
}

/// quadprog reports equality multipliers without their sign, so recover them
/// from stationarity, `Qx + c + A₂ᵀλ₂ = A₁ᵀλ₁`, by least squares.
fn equality_multipliers(
    q: &[f64],
    c: &[f64],
    a: &[f64],
    m_eq: usize,
    x: &[f64],
    lagr: &[f64],
) -> Vec<f64> {
    let n = c.len();
    if m_eq == 0 {
        return Vec::new();
    }
    let row = |i: usize| &a[i * n..(i + 1) * n];
    let mut r: Vec<f64> = (0..n)
        .map(|i| dot(&q[i * n..(i + 1) * n], x) + c[i])
        .collect();
    for (i, l) in lagr.iter().enumerate().skip(m_eq) {
        if *l != 0.0 {
            for (rj, aj) in r.iter_mut().zip(row(i)) {
                *rj += l * aj;
            }
        }
    }
    let mut normal = vec![0.0; m_eq * m_eq];
    let mut rhs = vec![0.0; m_eq];
    for i in 0..m_eq {
        for j in 0..m_eq {
            normal[i * m_eq + j] = dot(row(i), row(j));
        }
        rhs[i] = dot(row(i), &r);
    }
    solve_dense(&mut normal, &mut rhs, m_eq);
    rhs
}

/// Gaussian elimination with partial pivoting; singular pivots yield zeros.
fn solve_dense(m: &mut [f64], b: &mut [f64], n: usize) {
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs()))
            .unwrap();
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            b.swap(k, p);
        }
        let pivot = m[k * n + k];
        if pivot.abs() < 1e-300 {
            continue;
        }
        for i in k + 1..n {
            let f = m[i * n + k] / pivot;
            for j in k..n {
                m[i * n + j] -= f * m[k * n + j];
            }
            b[i] -= f * b[k];
        }
    }
    for k in (0..n).rev() {
        let pivot = m[k * n + k];
        if pivot.abs() < 1e-300 {
            b[k] = 0.0;
            continue;
        }
        let tail: f64 = (k + 1..n).map(|j| m[k * n + j] * b[j]).sum();
        b[k] = (b[k] - tail) / pivot;
    }
}

fn lagrangian_gradient(ev: &Evaluation, lambda_eq: &[f64], lambda_in: &[f64]) -> Vec<f64> {
    let ce = ev.j_eq.tmul_vec(lambda_eq);
    let ci = ev.j_in.tmul_vec(lambda_in);
    ev.grad
        .iter()
        .zip(ce)
        .zip(ci)
        .map(|((g, a), b)| g - a - b)
        .collect()
}

/// Powell-damped BFGS update keeping `b` positive definite.
fn bfgs_update(b: &mut Matrix, s: &[f64], y: &[f64]) {
    let bs = b.mul_vec(s);
    let sbs = dot(s, &bs);
    if sbs <= 1e-300 {
        return;
    }
    let sy = dot(s, y);
    let theta = if sy >= 0.2 * sbs {
        1.0
    } else {
        0.8 * sbs / (sbs - sy)
    };
    let r: Vec<f64> = y
        .iter()
        .zip(&bs)
        .map(|(yi, bi)| theta * yi + (1.0 - theta) * bi)
        .collect();
    let sr = dot(s, &r);
    if sr <= 1e-300 {
        return;
    }
    let n = b.cols;
    for i in 0..n {
        for j in 0..n {
            b.data[i * n + j] += r[i] * r[j] / sr - bs[i] * bs[j] / sbs;
        }
    }
}

fn identity(n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        m.data[i * n + i] = 1.0;
    }
    m
}

pub(crate) fn solve(nlp: &impl Nlp, x0: Vec<f64>, opts: &SqpOptions) -> SqpOutcome {
    let n = nlp.dim();
    let lo = nlp.lower_bounds();
    let max_radius = nlp.trust_radius(&x0);
    let mut radius = max_radius.clone();
    let mut x = x0;
    let mut ev = nlp.evaluate(&x, true);
    let mut b = identity(n);
    let mut penalty = 1.0;
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut iterations = 0;
    let mut converged = false;
    let mut rejections = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let violation = ev.violation();
        if violation <= opts.constraint_tolerance && best.as_ref().is_none_or(|(f, _, _)| ev.f < *f)
        {
            best = Some((ev.f, x.clone(), violation));
        }

        let upper = radius.clone();
        let lower: Vec<f64> = (0..n).map(|i| radius[i].min(x[i] - lo[i])).collect();
        let Some(step) = solve_subproblem(&b, &ev, &ev.c_eq, &ev.c_in, &upper, &lower, penalty)
        else {
            debug!("SQP subproblem failed at iteration {iterations}");
            break;
        };
        let step_norm = inf_norm(&step.d);
        let x_norm = inf_norm(&x);
        let predicted = dot(&ev.grad, &step.d).abs();
        if violation <= opts.constraint_tolerance
            && !step.hit_box
            && (step_norm <= opts.opt_tolerance * (1.0 + x_norm)
                || predicted <= opts.opt_tolerance * (1.0 + ev.f.abs()))
        {
            converged = true;
            break;
        }

        let lambda_max = inf_norm(&step.lambda_eq).max(inf_norm(&step.lambda_in));
        if penalty < 1.5 * lambda_max {
            penalty = (2.0 * lambda_max).min(1e8);
        }
        let merit = |e: &Evaluation| e.f + penalty * e.l1_violation();
        let phi0 = merit(&ev);
        let slope = dot(&ev.grad, &step.d) + penalty * (step.linear_violation - ev.l1_violation());

        let mut accepted = None;
        let trial_x: Vec<f64> = x.iter().zip(&step.d).map(|(a, b)| a + b).collect();
        let trial = nlp.evaluate(&trial_x, false);
        if merit(&trial) <= phi0 + 1e-4 * slope {
            accepted = Some((trial_x, step.d.clone(), 1.0));
        } else if let Some(corrected) =
            second_order_correction(&b, &ev, &trial, &step, &upper, &lower, penalty)
        {
            let soc_x: Vec<f64> = x.iter().zip(&corrected).map(|(a, b)| a + b).collect();
            let soc = nlp.evaluate(&soc_x, false);
            if merit(&soc) <= phi0 + 1e-4 * slope {
                accepted = Some((soc_x, corrected, 1.0));
            }
        }
        if accepted.is_none() {
            let mut alpha = 0.5;
            while alpha >= 1.0 / 64.0 {
                let d: Vec<f64> = step.d.iter().map(|v| alpha * v).collect();
                let xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
                if merit(&nlp.evaluate(&xt, false)) <= phi0 + 1e-4 * alpha * slope {
                    accepted = Some((xt, d, alpha));
                    break;
                }
                alpha *= 0.5;
            }
        }

        let Some((x_new, s, alpha)) = accepted else {
            rejections += 1;
            for r in radius.iter_mut() {
                *r *= 0.25;
            }
            if rejections % 3 == 0 {
                b = identity(n);
            }
            trace!("iteration {iterations}: step rejected, radius shrunk");
            if inf_norm(&radius) < 1e-14 {
                debug!("SQP trust region collapsed");
                break;
            }
            continue;
        };
        rejections = 0;

        let ev_new = nlp.evaluate(&x_new, true);
        let y: Vec<f64> = lagrangian_gradient(&ev_new, &step.lambda_eq, &step.lambda_in)
            .iter()
            .zip(lagrangian_gradient(&ev, &step.lambda_eq, &step.lambda_in))
            .map(|(a, b)| a - b)
            .collect();
        bfgs_update(&mut b, &s, &y);

        if alpha == 1.0 && step.hit_box {
            for (r, m) in radius.iter_mut().zip(&max_radius) {
                *r = (*r * 2.0).min(*m);
            }
        }
        trace!(
            "iteration {iterations}: f = {:.10}, violation = {:.3e}, |d| = {step_norm:.3e}, alpha = {alpha}",
            ev_new.f,
            ev_new.violation()
        );
        x = x_new;
        ev = ev_new;
    }

    let violation = ev.violation();
    if violation <= opts.constraint_tolerance && best.as_ref().is_none_or(|(f, _, _)| ev.f < *f) {
        best = Some((ev.f, x.clone(), violation));
    }
    match best {
        Some((_, xb, v)) if !converged => SqpOutcome {
            x: xb,
            converged,
            iterations,
            violation: v,
        },
        _ => SqpOutcome {
            x,
            converged,
            iterations,
            violation,
        },
    }
}

/// Re-solve the subproblem with constraint values taken at the rejected
/// trial point, pulling the step back onto the curved constraints.
fn second_order_correction(
    b: &Matrix,
    ev: &Evaluation,
    trial: &Evaluation,
    step: &QpStep,
    upper: &[f64],
    lower: &[f64],
    penalty: f64,
) -> Option<Vec<f64>> {
    let jd_eq = ev.j_eq.mul_vec(&step.d);
    let jd_in = ev.j_in.mul_vec(&step.d);
    let c_eq: Vec<f64> = trial.c_eq.iter().zip(&jd_eq).map(|(c, j)| c - j).collect();
    let c_in: Vec<f64> = trial.c_in.iter().zip(&jd_in).map(|(c, j)| c - j).collect();
    let soc = solve_subproblem(b, ev, &c_eq, &c_in, upper, lower, penalty)?;
    (soc.linear_violation == 0.0).then_some(soc.d)
}
