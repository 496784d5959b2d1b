//! Dense Gaussian elimination over a subfield of the tower. Entries are
//! raw encodings; all operations go through the context tables.

use crate::fields::FieldContext;

/// Rank of a row-major `rows` x `cols` matrix. Consumes the buffer.
pub(crate) fn rank(ctx: &FieldContext, m: &mut [u64], rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| m[r * cols + col] != 0);
        let Some(pr) = pivot else { continue };
        if pr != rank {
            for c in col..cols {
                m.swap(pr * cols + c, rank * cols + c);
            }
        }
        let pinv = ctx.inv_raw(m[rank * cols + col]).expect("pivot nonzero");
        for r in rank + 1..rows {
            let lead = m[r * cols + col];
            if lead == 0 {
                continue;
            }
            let factor = ctx.mul_raw(lead, pinv);
            m[r * cols + col] = 0;
            for c in col + 1..cols {
                let sub = ctx.mul_raw(factor, m[rank * cols + c]);
                m[r * cols + c] = ctx.sub_raw(m[r * cols + c], sub);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Basis of the right kernel {x : M x = 0} of a row-major matrix.
pub(crate) fn kernel(
    ctx: &FieldContext,
    m: &mut [u64],
    rows: usize,
    cols: usize,
) -> Vec<Vec<u64>> {
    // reduced row echelon form
    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows).find(|&r| m[r * cols + col] != 0);
        let Some(pr) = pivot else { continue };
        if pr != rank {
            for c in 0..cols {
                m.swap(pr * cols + c, rank * cols + c);
            }
        }
        let pinv = ctx.inv_raw(m[rank * cols + col]).expect("pivot nonzero");
        for c in col..cols {
            m[rank * cols + c] = ctx.mul_raw(m[rank * cols + c], pinv);
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let lead = m[r * cols + col];
            if lead == 0 {
                continue;
            }
            for c in col..cols {
                let sub = ctx.mul_raw(lead, m[rank * cols + c]);
                m[r * cols + c] = ctx.sub_raw(m[r * cols + c], sub);
            }
        }
        pivot_col_of_row.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }

    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let is_pivot = {
        let mut v = vec![false; cols];
        for &c in &pivot_cols {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if is_pivot[free] {
            continue;
        }
        let mut vec = vec![0u64; cols];
        vec[free] = 1;
        for (row, &pc) in pivot_cols.iter().enumerate() {
            vec[pc] = ctx.neg_raw(m[row * cols + free]);
        }
        basis.push(vec);
    }
    basis
}

/// Row-reduces `a` (rows x cols, full column rank expected) and returns a
/// solver for `a · x = y`: pivot bookkeeping plus the elimination matrix.
pub(crate) struct Decomposer {
    rows: usize,
    cols: usize,
    /// E such that E·a is in reduced row echelon form; rows x rows.
    elim: Vec<u64>,
    /// pivot_row[j] = row of E·a holding the pivot of column j.
    pivot_row: Vec<usize>,
}

impl Decomposer {
    /// Returns None if the columns of `a` are dependent.
    pub(crate) fn new(ctx: &FieldContext, a: &[u64], rows: usize, cols: usize) -> Option<Decomposer> {
        let mut m = a.to_vec();
        let mut elim = vec![0u64; rows * rows];
        for i in 0..rows {
            elim[i * rows + i] = 1;
        }
        let mut pivot_row = Vec::with_capacity(cols);
        let mut rank = 0;
        for col in 0..cols {
            let pivot = (rank..rows).find(|&r| m[r * cols + col] != 0)?;
            if pivot != rank {
                for c in 0..cols {
                    m.swap(pivot * cols + c, rank * cols + c);
                }
                for c in 0..rows {
                    elim.swap(pivot * rows + c, rank * rows + c);
                }
            }
            let pinv = ctx.inv_raw(m[rank * cols + col]).ok()?;
            for c in 0..cols {
                m[rank * cols + c] = ctx.mul_raw(m[rank * cols + c], pinv);
            }
            for c in 0..rows {
                elim[rank * rows + c] = ctx.mul_raw(elim[rank * rows + c], pinv);
            }
            for r in 0..rows {
                if r == rank {
                    continue;
                }
                let lead = m[r * cols + col];
                if lead == 0 {
                    continue;
                }
                for c in 0..cols {
                    let sub = ctx.mul_raw(lead, m[rank * cols + c]);
                    m[r * cols + c] = ctx.sub_raw(m[r * cols + c], sub);
                }
                for c in 0..rows {
                    let sub = ctx.mul_raw(lead, elim[rank * rows + c]);
                    elim[r * rows + c] = ctx.sub_raw(elim[r * rows + c], sub);
                }
            }
            pivot_row.push(rank);
            rank += 1;
        }
        Some(Decomposer { rows, cols, elim, pivot_row })
    }

    /// Solves a·x = y for y known to lie in the column span.
    pub(crate) fn solve(&self, ctx: &FieldContext, y: &[u64]) -> Vec<u64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0u64; self.cols];
        for (j, &pr) in self.pivot_row.iter().enumerate() {
            let mut acc = 0u64;
            for c in 0..self.rows {
                let e = self.elim[pr * self.rows + c];
                if e != 0 && y[c] != 0 {
                    acc = ctx.add_raw(acc, ctx.mul_raw(e, y[c]));
                }
            }
            out[j] = acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldContext;

    #[test]
    fn rank_and_kernel_over_f3() {
        let ctx = FieldContext::build_tower(3, 1, 1).unwrap();
        // [1 2; 2 1] over F_3 has det 1-4 = 0, rank 1
        let mut m = vec![1, 2, 2, 1];
        assert_eq!(rank(&ctx, &mut m, 2, 2), 1);
        let mut m = vec![1, 2, 2, 1];
        let k = kernel(&ctx, &mut m, 2, 2);
        assert_eq!(k.len(), 1);
        // kernel vector v satisfies v0 + 2 v1 = 0
        let v = &k[0];
        assert_eq!(ctx.add_raw(v[0], ctx.mul_raw(2, v[1])), 0);
    }

    #[test]
    fn decomposer_solves() {
        let ctx = FieldContext::build_tower(3, 1, 1).unwrap();
        // overdetermined full-column-rank 3x2 over F_3
        let a = vec![1, 0, 1, 1, 0, 1];
        let d = Decomposer::new(&ctx, &a, 3, 2).unwrap();
        // y = a * (2,1)^T = (2, 0, 1)
        let x = d.solve(&ctx, &[2, 0, 1]);
        assert_eq!(x, vec![2, 1]);
    }
}
