//! Exact linear feasibility by two-phase simplex with Bland's rule.
//!
//! Strict inequalities are handled with one auxiliary slack `s` in `[0, 1]`
//! that is subtracted from every strict row and then maximised: the strict
//! system is feasible iff the optimal slack is positive. Systems without
//! strict rows put the slack on every inequality instead, which centres the
//! witness without changing feasibility.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Gt,
    Le,
    Lt,
    Eq,
}

/// `coeffs · x  (relation)  rhs`.
#[derive(Clone, Debug)]
pub struct LinearConstraint {
    pub coeffs: Vec<Scalar>,
    pub relation: Relation,
    pub rhs: Scalar,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) -> Self {
        LinearConstraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn satisfied_by(&self, x: &[Scalar]) -> bool {
        let lhs = self
            .coeffs
            .iter()
            .zip(x)
            .fold(Scalar::zero(self.rhs.mode()), |acc, (a, v)| acc + a * v);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Gt => lhs > self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Lt => lhs < self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<Scalar>),
    Infeasible,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Scalar]> {
        match self {
            LpOutcome::Feasible(x) => Some(x),
            LpOutcome::Infeasible => None,
        }
    }
}

fn exact(s: &Scalar) -> Result<BigRational> {
    s.as_exact()
        .cloned()
        .ok_or_else(|| Error::Unsupported("linear programming requires exact scalars".into()))
}

/// Decide feasibility of a mixed strict/non-strict linear system in `n`
/// free variables, returning an exact witness when feasible.
pub fn lp_feasible(n: usize, constraints: &[LinearConstraint]) -> Result<LpOutcome> {
    // Normalise every row to  a·x  >=  b  (strict or not) or  a·x = b.
    let mut rows: Vec<(Vec<BigRational>, BigRational, RowKind)> = Vec::new();
    for c in constraints {
        if c.coeffs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: c.coeffs.len(),
            });
        }
        let a: Vec<BigRational> = c.coeffs.iter().map(exact).collect::<Result<_>>()?;
        let b = exact(&c.rhs)?;
        let neg = |v: &[BigRational]| v.iter().map(|x| -x).collect::<Vec<_>>();
        match c.relation {
            Relation::Ge => rows.push((a, b, RowKind::Ge { strict: false })),
            Relation::Gt => rows.push((a, b, RowKind::Ge { strict: true })),
            Relation::Le => rows.push((neg(&a), -b, RowKind::Ge { strict: false })),
            Relation::Lt => rows.push((neg(&a), -b, RowKind::Ge { strict: true })),
            Relation::Eq => rows.push((a, b, RowKind::Eq)),
        }
    }
    let any_strict = rows
        .iter()
        .any(|r| matches!(r.2, RowKind::Ge { strict: true }));

    // Column layout: x+ (n) | x- (n) | s | surplus per inequality | u (s + u = 1)
    let n_ineq = rows.iter().filter(|r| r.2 != RowKind::Eq).count();
    let col_s = 2 * n;
    let col_surplus0 = col_s + 1;
    let col_u = col_surplus0 + n_ineq;
    let n_struct = col_u + 1;

    let mut a_rows: Vec<Vec<BigRational>> = Vec::with_capacity(rows.len() + 1);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(rows.len() + 1);
    let mut surplus_idx = 0;
    for (a, b, kind) in &rows {
        let mut row = vec![BigRational::zero(); n_struct];
        for j in 0..n {
            row[j] = a[j].clone();
            row[n + j] = -&a[j];
        }
        if let RowKind::Ge { strict } = kind {
            if *strict || !any_strict {
                row[col_s] = -BigRational::one();
            }
            row[col_surplus0 + surplus_idx] = -BigRational::one();
            surplus_idx += 1;
        }
        a_rows.push(row);
        rhs.push(b.clone());
    }
    let mut cap = vec![BigRational::zero(); n_struct];
    cap[col_s] = BigRational::one();
    cap[col_u] = BigRational::one();
    a_rows.push(cap);
    rhs.push(BigRational::one());

    let mut objective = vec![BigRational::zero(); n_struct];
    objective[col_s] = BigRational::one();

    match Simplex::solve(a_rows, rhs, objective)? {
        None => Ok(LpOutcome::Infeasible),
        Some((x, value)) => {
            if any_strict && !value.is_positive() {
                return Ok(LpOutcome::Infeasible);
            }
            let witness = (0..n)
                .map(|j| Scalar::from_big(&x[j] - &x[n + j]))
                .collect();
            Ok(LpOutcome::Feasible(witness))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum RowKind {
    Ge { strict: bool },
    Eq,
}

/// Dense tableau for `max c·x  s.t.  A x = b, x >= 0`.
struct Simplex {
    t: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
}

impl Simplex {
    /// Returns `None` when infeasible, otherwise an optimal vertex and value.
    /// The caller guarantees boundedness.
    fn solve(
        a: Vec<Vec<BigRational>>,
        b: Vec<BigRational>,
        c: Vec<BigRational>,
    ) -> Result<Option<(Vec<BigRational>, BigRational)>> {
        let m = a.len();
        let n_struct = c.len();
        let mut t = a;
        let mut rhs = b;
        for i in 0..m {
            if rhs[i].is_negative() {
                for v in t[i].iter_mut() {
                    *v = -&*v;
                }
                rhs[i] = -&rhs[i];
            }
        }
        // Reuse a slack-like column (+1 here, 0 in every other row) as the
        // initial basic variable where possible; otherwise add an artificial.
        let mut basis = vec![usize::MAX; m];
        for j in 0..n_struct {
            let mut hit = None;
            let mut ok = true;
            for i in 0..m {
                if !t[i][j].is_zero() {
                    if t[i][j].is_one() && hit.is_none() {
                        hit = Some(i);
                    } else {
                        ok = false;
                        break;
                    }
                }
            }
            if let (true, Some(i)) = (ok, hit) {
                if basis[i] == usize::MAX {
                    basis[i] = j;
                }
            }
        }
        let mut n_cols = n_struct;
        for i in 0..m {
            if basis[i] == usize::MAX {
                for (k, row) in t.iter_mut().enumerate() {
                    row.push(if k == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    });
                }
                basis[i] = n_cols;
                n_cols += 1;
            }
        }
        let mut s = Simplex { t, rhs, basis };

        if n_cols > n_struct {
            let mut phase1 = vec![BigRational::zero(); n_cols];
            for v in phase1.iter_mut().skip(n_struct) {
                *v = -BigRational::one();
            }
            s.optimise(&phase1)?;
            let value = s.objective_value(&phase1);
            if value.is_negative() {
                return Ok(None);
            }
            // Drive zero-level artificials out of the basis.
            let mut i = 0;
            while i < s.basis.len() {
                if s.basis[i] >= n_struct {
                    if let Some(j) = (0..n_struct).find(|&j| !s.t[i][j].is_zero()) {
                        s.pivot(i, j);
                    } else {
                        s.t.remove(i);
                        s.rhs.remove(i);
                        s.basis.remove(i);
                        continue;
                    }
                }
                i += 1;
            }
            for row in s.t.iter_mut() {
                row.truncate(n_struct);
            }
        }
        s.optimise(&c)?;
        let value = s.objective_value(&c);
        let mut x = vec![BigRational::zero(); n_struct];
        for (i, &j) in s.basis.iter().enumerate() {
            x[j] = s.rhs[i].clone();
        }
        Ok(Some((x, value)))
    }

    fn objective_value(&self, c: &[BigRational]) -> BigRational {
        self.basis
            .iter()
            .zip(&self.rhs)
            .fold(BigRational::zero(), |acc, (&j, b)| acc + &c[j] * b)
    }

    fn optimise(&mut self, c: &[BigRational]) -> Result<()> {
        let n_cols = c.len();
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            if iterations > 100_000 {
                return Err(Error::Resource("simplex iteration limit".into()));
            }
            // Bland: lowest-index improving column.
            let entering = (0..n_cols).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = c[j].clone();
                for (i, &bj) in self.basis.iter().enumerate() {
                    if !c[bj].is_zero() && !self.t[i][j].is_zero() {
                        d -= &c[bj] * &self.t[i][j];
                    }
                }
                d.is_positive()
            });
            let Some(j) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.t.len() {
                if self.t[i][j].is_positive() {
                    let ratio = &self.rhs[i] / &self.t[i][j];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((i, _)) = leave else {
                return Err(Error::Invalid("unbounded linear program".into()));
            };
            self.pivot(i, j);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        if !p.is_one() {
            for v in self.t[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = self.t[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for (v, pv) in self.t[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }
}

/// Exact solution of a square linear system, `None` if singular.
pub fn solve_square(rows: &[Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = rows.len();
    let mode = rhs.first()?.mode();
    let mut m: Vec<Vec<Scalar>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = match mode {
            crate::scalar::Mode::Exact => (col..n).find(|&i| !m[i][col].is_zero())?,
            crate::scalar::Mode::Approximate => {
                let best = (col..n).max_by(|&a, &b| {
                    m[a][col]
                        .to_f64()
                        .abs()
                        .total_cmp(&m[b][col].to_f64().abs())
                })?;
                if m[best][col].to_f64().abs() < 1e-14 {
                    return None;
                }
                best
            }
        };
        m.swap(col, piv);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &p;
        }
        let prow = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &(&f * pv);
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Rank of an integer matrix, computed exactly.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let a = m[rank][col].clone();
                let b = m[i][col].clone();
                let pivot = m[rank].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot) {
                    *v = &*v * &a - pv * &b;
                }
            }
        }
        rank += 1;
    }
    rank
}
