//! Invariant factors of large sparse relation matrices.
//!
//! Relations with a `±1` coefficient let the corresponding generator be
//! written in terms of the others; eliminating such pairs leaves an
//! isomorphic, much smaller presentation whose Smith form is then computed
//! densely. Coefficients are kept in `i64` with overflow checks; on overflow
//! the caller falls back to the dense big-integer algorithm.

use num_bigint::BigInt;

use super::snf::{smith_diagonal, Matrix};

pub type SparseRow = Vec<(usize, i64)>;

/// Result of eliminating unit pivots: the residual matrix over the
/// surviving generators.
pub struct Reduced {
    pub residual: Matrix,
    pub residual_cols: usize,
}

fn axpy(dst: &SparseRow, q: i64, src: &SparseRow) -> Option<SparseRow> {
    // dst + q * src, both sorted by column.
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        if j == src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
            out.push(dst[i]);
            i += 1;
        } else if i == dst.len() || src[j].0 < dst[i].0 {
            out.push((src[j].0, q.checked_mul(src[j].1)?));
            j += 1;
        } else {
            let v = dst[i].1.checked_add(q.checked_mul(src[j].1)?)?;
            if v != 0 {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Eliminates unit pivots; `None` signals coefficient overflow.
pub fn eliminate_units(rows: &[SparseRow], ncols: usize) -> Option<Reduced> {
    let mut rows: Vec<Option<SparseRow>> = rows.iter().filter(|r| !r.is_empty()).cloned().map(Some).collect();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r.as_ref().unwrap() {
            col_rows[c].push(i);
        }
    }
    let mut col_alive = vec![true; ncols];
    let mut queue: Vec<usize> = (0..rows.len()).collect();
    while let Some(ri) = queue.pop() {
        let Some(row) = rows[ri].as_ref() else { continue };
        // Choose the unit entry whose column touches the fewest rows.
        let pick = row
            .iter()
            .filter(|(_, v)| v.abs() == 1)
            .min_by_key(|(c, _)| col_rows[*c].len())
            .copied();
        let Some((pc, pv)) = pick else { continue };
        let pivot = rows[ri].take().unwrap();
        col_alive[pc] = false;
        let others = std::mem::take(&mut col_rows[pc]);
        for oi in others {
            if oi == ri {
                continue;
            }
            let Some(other) = rows[oi].as_ref() else { continue };
            let Ok(pos) = other.binary_search_by_key(&pc, |e| e.0) else { continue };
            let coef = other[pos].1;
            // other - coef * pv * pivot clears column pc (pv = ±1).
            let q = coef.checked_mul(pv)?.checked_neg()?;
            let new = axpy(other, q, &pivot)?;
            for &(c, _) in &new {
                // Stale or repeated entries are harmless: they are re-checked above.
                if c != pc {
                    col_rows[c].push(oi);
                }
            }
            if new.is_empty() {
                rows[oi] = None;
            } else {
                rows[oi] = Some(new);
                queue.push(oi);
            }
        }
    }
    let live: Vec<usize> = (0..ncols).filter(|&c| col_alive[c]).collect();
    let mut pos = vec![usize::MAX; ncols];
    for (k, &c) in live.iter().enumerate() {
        pos[c] = k;
    }
    let mut survivors: Vec<SparseRow> = rows.into_iter().flatten().collect();
    survivors.sort();
    survivors.dedup();
    let residual = survivors
        .into_iter()
        .map(|r| {
            let mut dense = vec![BigInt::from(0); live.len()];
            for (c, v) in r {
                dense[pos[c]] = BigInt::from(v);
            }
            dense
        })
        .collect();
    Some(Reduced { residual, residual_cols: live.len() })
}

/// Smith diagonal of the presentation (padded conceptually with zero
/// columns), computed through unit elimination when possible.
pub fn invariant_diagonal(rows: &[SparseRow], ncols: usize) -> (Vec<BigInt>, usize) {
    match eliminate_units(rows, ncols) {
        Some(red) => (smith_diagonal(&red.residual, red.residual_cols), red.residual_cols),
        None => {
            let dense: Matrix = rows
                .iter()
                .map(|r| {
                    let mut d = vec![BigInt::from(0); ncols];
                    for &(c, v) in r {
                        d[c] = BigInt::from(v);
                    }
                    d
                })
                .collect();
            (smith_diagonal(&dense, ncols), ncols)
        }
    }
}
