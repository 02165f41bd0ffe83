use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Unbounded,
    Infeasible,
}

/// max c.x subject to rows[i].x <= rhs[i], x free (optionally boxed by |x_k| <= bound).
pub fn maximize(c: &[f64], rows: &[Vec<f64>], rhs: &[f64], bound: Option<f64>) -> Result<LpOutcome> {
    let mut p = Problem::new(OptimizationDirection::Maximize);
    let b = bound.unwrap_or(f64::INFINITY);
    // columns without constraints are fixed (or make the problem unbounded)
    let mut vars = Vec::with_capacity(c.len());
    for (k, &ck) in c.iter().enumerate() {
        let used = rows.iter().any(|r| r[k] != 0.0);
        if !used && b.is_infinite() {
            if ck != 0.0 {
                return Ok(LpOutcome::Unbounded);
            }
            vars.push(p.add_var(0.0, (0.0, 0.0)));
        } else {
            vars.push(p.add_var(ck, (-b, b)));
        }
    }
    for (row, &r) in rows.iter().zip(rhs) {
        let terms: Vec<_> = vars.iter().zip(row).filter(|(_, a)| **a != 0.0).map(|(v, a)| (*v, *a)).collect();
        if terms.is_empty() {
            if r < 0.0 {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        p.add_constraint(terms.as_slice(), ComparisonOp::Le, r);
    }
    match p.solve() {
        Ok(outcome) => match outcome.into_solution() {
            Ok(sol) => {
                let x = vars.iter().map(|v| sol.var_value(*v)).collect();
                Ok(LpOutcome::Optimal { value: sol.objective(), x })
            }
            Err(_) => Err(Error::Lp("interrupted".into())),
        },
        Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
        Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
        Err(e) => Err(Error::Lp(e.to_string())),
    }
}

/// min c.y subject to rows[i].y = rhs[i], y >= 0.
pub fn minimize_nonneg_eq(c: &[f64], rows: &[Vec<f64>], rhs: &[f64]) -> Result<LpOutcome> {
    let mut p = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = c.iter().map(|&ck| p.add_var(ck, (0.0, f64::INFINITY))).collect();
    for (row, &r) in rows.iter().zip(rhs) {
        let terms: Vec<_> = vars.iter().zip(row).filter(|(_, a)| **a != 0.0).map(|(v, a)| (*v, *a)).collect();
        if terms.is_empty() {
            if r != 0.0 {
                return Ok(LpOutcome::Infeasible);
            }
            continue;
        }
        p.add_constraint(terms.as_slice(), ComparisonOp::Eq, r);
    }
    match p.solve() {
        Ok(outcome) => match outcome.into_solution() {
            Ok(sol) => {
                let x = vars.iter().map(|v| sol.var_value(*v)).collect();
                Ok(LpOutcome::Optimal { value: sol.objective(), x })
            }
            Err(_) => Err(Error::Lp("interrupted".into())),
        },
        Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
        Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
        Err(e) => Err(Error::Lp(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_support() {
        let rows = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let rhs = vec![1.0; 4];
        match maximize(&[1.0, 1.0], &rows, &rhs, None).unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 2.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(maximize(&[1.0, 0.0], &rows[1..], &rhs[1..], None).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_form() {
        // min y0 + 2 y1 with y0 + y1 = 1
        match minimize_nonneg_eq(&[1.0, 2.0], &[vec![1.0, 1.0]], &[1.0]).unwrap() {
            LpOutcome::Optimal { value, x } => assert!((value - 1.0).abs() < 1e-12 && (x[0] - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(minimize_nonneg_eq(&[1.0], &[vec![1.0]], &[-1.0]).unwrap(), LpOutcome::Infeasible);
    }
}
