use std::collections::BTreeSet;

use super::{Weight, WeightError};

pub const DEFAULT_CLOSURE_ROUNDS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowColumn<W> {
    /// `u` with `sum_j u[i][j] = rows[i]` and `sum_i u[i][j] = cols[j]`.
    Witness(Vec<Vec<W>>),
    /// No matrix with entries from the candidate set satisfies both sums.
    NotFoundInBound,
}

/// Bounded search for a row-column witness.
///
/// Candidate entries are the closure of `{0} ∪ rows ∪ cols` under pairwise
/// sums, iterated `rounds` times and capped at the common sum (all built-in
/// carriers are naturally ordered, so no entry can exceed it). A negative
/// answer only means no witness exists among the candidates.
pub fn check_row_column<W: Weight>(rows: &[W], cols: &[W], rounds: usize) -> Result<RowColumn<W>, WeightError> {
    let s_rows = W::sum(rows);
    let s_cols = W::sum(cols);
    if s_rows != s_cols {
        return Err(WeightError::SumMismatch { rows: s_rows.to_string(), cols: s_cols.to_string() });
    }
    let mut cands: BTreeSet<W> = rows.iter().chain(cols).cloned().collect();
    cands.insert(W::zero());
    for _ in 0..rounds {
        let current: Vec<W> = cands.iter().cloned().collect();
        for a in &current {
            for b in &current {
                let c = a.clone() + b.clone();
                if c <= s_rows {
                    cands.insert(c);
                }
            }
        }
    }
    let cands: Vec<W> = cands.into_iter().filter(|c| *c <= s_rows).collect();

    let mut grid = vec![vec![W::zero(); cols.len()]; rows.len()];
    let mut col_acc = vec![W::zero(); cols.len()];
    if search(rows, cols, &cands, 0, W::zero(), &mut grid, &mut col_acc) {
        Ok(RowColumn::Witness(grid))
    } else {
        Ok(RowColumn::NotFoundInBound)
    }
}

fn search<W: Weight>(
    rows: &[W],
    cols: &[W],
    cands: &[W],
    cell: usize,
    row_acc: W,
    grid: &mut [Vec<W>],
    col_acc: &mut [W],
) -> bool {
    let m = cols.len();
    if rows.is_empty() || m == 0 {
        return rows.iter().all(|w| w.is_zero()) && cols.iter().all(|w| w.is_zero());
    }
    if cell == rows.len() * m {
        return col_acc.iter().zip(cols).all(|(a, c)| a == c);
    }
    let (i, j) = (cell / m, cell % m);
    for c in cands {
        let r = row_acc.clone() + c.clone();
        let k = col_acc[j].clone() + c.clone();
        if r > rows[i] || k > cols[j] {
            continue;
        }
        let last_in_row = j + 1 == m;
        if last_in_row && r != rows[i] {
            continue;
        }
        if i + 1 == rows.len() && k != cols[j] {
            continue;
        }
        let saved = std::mem::replace(&mut col_acc[j], k);
        grid[i][j] = c.clone();
        let next_row_acc = if last_in_row { W::zero() } else { r };
        if search(rows, cols, cands, cell + 1, next_row_acc, grid, col_acc) {
            return true;
        }
        col_acc[j] = saved;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{Bool, Rational};

    fn q(s: &str) -> Rational {
        Rational::parse_weight(s).unwrap()
    }

    fn check_witness<W: Weight>(rows: &[W], cols: &[W], u: &[Vec<W>]) {
        for (i, w) in rows.iter().enumerate() {
            assert_eq!(&W::sum(&u[i]), w);
        }
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(&W::sum(u.iter().map(|row| &row[j])), v);
        }
    }

    #[test]
    fn one_by_one_is_forced() {
        let r = check_row_column(&[q("3/2")], &[q("3/2")], 3).unwrap();
        assert_eq!(r, RowColumn::Witness(vec![vec![q("3/2")]]));
    }

    // Brute force over the grid {0, 1/2, 1, 3/2, 2}^2: the only matrix with
    // row sums (1, 1) and column sum (2) is [[1], [1]].
    #[test]
    fn rationals_two_by_one() {
        let grid = ["0", "1/2", "1", "3/2", "2"].map(q);
        let mut solutions = vec![];
        for a in &grid {
            for b in &grid {
                if *a == q("1") && *b == q("1") && a.clone() + b.clone() == q("2") {
                    solutions.push(vec![vec![a.clone()], vec![b.clone()]]);
                }
            }
        }
        assert_eq!(solutions.len(), 1);
        let r = check_row_column(&[q("1"), q("1")], &[q("2")], 3).unwrap();
        assert_eq!(r, RowColumn::Witness(solutions.pop().unwrap()));
    }

    // Exhaustive over {tt, ff}^2: rows (tt, ff), column (tt) forces [[tt], [ff]].
    #[test]
    fn booleans_exhaustive() {
        let mut solutions = vec![];
        for a in [Bool::FF, Bool::TT] {
            for b in [Bool::FF, Bool::TT] {
                if a == Bool::TT && b == Bool::FF && (a + b) == Bool::TT {
                    solutions.push(vec![vec![a], vec![b]]);
                }
            }
        }
        assert_eq!(solutions, vec![vec![vec![Bool::TT], vec![Bool::FF]]]);
        let r = check_row_column(&[Bool::TT, Bool::FF], &[Bool::TT], 3).unwrap();
        assert_eq!(r, RowColumn::Witness(solutions.pop().unwrap()));
    }

    #[test]
    fn sum_mismatch_is_an_error() {
        assert!(matches!(check_row_column(&[q("1")], &[q("2")], 3), Err(WeightError::SumMismatch { .. })));
    }

    #[test]
    fn larger_rational_instance() {
        let rows = [q("1"), q("1/2"), q("3/2")];
        let cols = [q("2"), q("1")];
        match check_row_column(&rows, &cols, 3).unwrap() {
            RowColumn::Witness(u) => check_witness(&rows, &cols, &u),
            RowColumn::NotFoundInBound => panic!("expected a witness"),
        }
    }

    #[test]
    fn boolean_overlap_needs_both_cells() {
        let rows = [Bool::TT, Bool::TT];
        let cols = [Bool::TT, Bool::TT, Bool::FF];
        match check_row_column(&rows, &cols, 1).unwrap() {
            RowColumn::Witness(u) => check_witness(&rows, &cols, &u),
            RowColumn::NotFoundInBound => panic!("expected a witness"),
        }
    }
}
