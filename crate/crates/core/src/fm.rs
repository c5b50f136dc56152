//! Feasibility of small linear systems by Fourier–Motzkin elimination.
//!
//! Used for the supporting-functional face test and the fan separation
//! test. Equalities are eliminated by substitution first; inequalities are
//! then combined pairwise one variable at a time, with duplicate rows
//! removed after each step.

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `a · x >= b`
    Ge,
    /// `a · x == b`
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<S> {
    pub coeffs: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

impl<S: Scalar> Constraint<S> {
    pub fn ge(coeffs: Vec<S>, rhs: S) -> Self {
        Constraint { coeffs, relation: Relation::Ge, rhs }
    }

    pub fn eq(coeffs: Vec<S>, rhs: S) -> Self {
        Constraint { coeffs, relation: Relation::Eq, rhs }
    }

    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs());
        if let Some(l) = lead {
            for c in self.coeffs.iter_mut() {
                *c = c.clone() / l.clone();
            }
            self.rhs = self.rhs / l;
        }
        self
    }
}

/// Whether some `x` in `S^nvars` satisfies every constraint.
pub fn feasible<S: Scalar>(nvars: usize, constraints: &[Constraint<S>]) -> bool {
    let mut eqs: Vec<Constraint<S>> = Vec::new();
    let mut ineqs: Vec<Constraint<S>> = Vec::new();
    for c in constraints {
        assert_eq!(c.coeffs.len(), nvars, "constraint arity mismatch");
        match c.relation {
            Relation::Eq => eqs.push(c.clone()),
            Relation::Ge => ineqs.push(c.clone()),
        }
    }

    // substitution of equalities
    while let Some(e) = eqs.pop() {
        let Some(k) = e.coeffs.iter().position(|c| !c.is_zero()) else {
            if !e.rhs.is_zero() {
                return false;
            }
            continue;
        };
        let a = e.coeffs[k].clone();
        let substitute = |c: &mut Constraint<S>| {
            let f = c.coeffs[k].clone();
            if f.is_zero() {
                return;
            }
            let ratio = f / a.clone();
            for (x, y) in c.coeffs.iter_mut().zip(&e.coeffs) {
                *x = x.clone() - ratio.clone() * y.clone();
            }
            c.rhs = c.rhs.clone() - ratio * e.rhs.clone();
        };
        eqs.iter_mut().for_each(substitute);
        ineqs.iter_mut().for_each(substitute);
    }

    let mut rows: Vec<Constraint<S>> = dedup(ineqs.into_iter().map(Constraint::normalized).collect());
    for k in 0..nvars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in rows {
            if c.coeffs[k].is_positive() {
                pos.push(c);
            } else if c.coeffs[k].is_negative() {
                neg.push(c);
            } else {
                rest.push(c);
            }
        }
        for p in &pos {
            for n in &neg {
                let wp = -n.coeffs[k].clone();
                let wn = p.coeffs[k].clone();
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| wp.clone() * x.clone() + wn.clone() * y.clone())
                    .collect();
                let rhs = wp * p.rhs.clone() + wn * n.rhs.clone();
                rest.push(Constraint::ge(coeffs, rhs).normalized());
            }
        }
        rows = dedup(rest);
        if rows.iter().any(|c| c.coeffs.iter().all(|x| x.is_zero()) && c.rhs.is_positive()) {
            return false;
        }
    }
    rows.iter().all(|c| !c.rhs.is_positive())
}

fn dedup<S: Scalar>(rows: Vec<Constraint<S>>) -> Vec<Constraint<S>> {
    let mut out: Vec<Constraint<S>> = Vec::with_capacity(rows.len());
    for r in rows {
        // a row that is implied by an existing one with the same normal can go
        if let Some(o) = out.iter_mut().find(|o| o.coeffs == r.coeffs) {
            if r.rhs > o.rhs {
                o.rhs = r.rhs;
            }
            continue;
        }
        out.push(r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(a: i64) -> BigRational {
        BigRational::from_integer(a.into())
    }

    #[test]
    fn box_and_contradiction() {
        // x >= 1, -x >= -3
        let c = vec![Constraint::ge(vec![q(1)], q(1)), Constraint::ge(vec![q(-1)], q(-3))];
        assert!(feasible(1, &c));
        // x >= 4, x <= 3
        let c = vec![Constraint::ge(vec![q(1)], q(4)), Constraint::ge(vec![q(-1)], q(-3))];
        assert!(!feasible(1, &c));
    }

    #[test]
    fn equalities_substitute() {
        // x + y = 0, x >= 1, y >= 1 is infeasible
        let c = vec![
            Constraint::eq(vec![q(1), q(1)], q(0)),
            Constraint::ge(vec![q(1), q(0)], q(1)),
            Constraint::ge(vec![q(0), q(1)], q(1)),
        ];
        assert!(!feasible(2, &c));
        // x - y = 0, x >= 1, y >= 1 is feasible
        let c = vec![
            Constraint::eq(vec![q(1), q(-1)], q(0)),
            Constraint::ge(vec![q(1), q(0)], q(1)),
            Constraint::ge(vec![q(0), q(1)], q(1)),
        ];
        assert!(feasible(2, &c));
    }

    #[test]
    fn supporting_functional_for_interior_ray_is_infeasible() {
        // cone <(1,0),(1,1),(1,2)>: phi(1,1) = 0 and phi >= 1 on the others
        let c = vec![
            Constraint::eq(vec![q(1), q(1)], q(0)),
            Constraint::ge(vec![q(1), q(0)], q(1)),
            Constraint::ge(vec![q(1), q(2)], q(1)),
        ];
        assert!(!feasible(2, &c));
        let c = vec![
            Constraint::eq(vec![q(1), q(0)], q(0)),
            Constraint::ge(vec![q(1), q(1)], q(1)),
            Constraint::ge(vec![q(1), q(2)], q(1)),
        ];
        assert!(feasible(2, &c));
    }
}
